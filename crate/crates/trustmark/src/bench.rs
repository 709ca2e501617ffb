//! Wall-clock measurement of the signature and commitment operations,
//! reported alongside exact serialized sizes.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::ars::{self, okgen, ukgen, Ring, RingSig};
use crate::crs::PublicParams;
use crate::error::Error;
use crate::group::Scalar;
use crate::pedersen::{self, Decommit};

/// Timing and size report for one operation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchReport {
    pub op: String,
    pub iterations: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
    /// Serialized size of the operation's output, when it has one.
    pub serialized_bytes: Option<usize>,
}

fn measure<F: FnMut()>(op: &str, iterations: usize, mut f: F) -> BenchReport {
    // Warm-up pass so first-touch costs do not skew the distribution.
    f();
    let mut samples = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let start = Instant::now();
        f();
        samples.push(start.elapsed().as_secs_f64() * 1e3);
    }
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mean_ms = samples.iter().sum::<f64>() / samples.len() as f64;
    let median_ms = samples[samples.len() / 2];
    BenchReport {
        op: op.to_string(),
        iterations,
        mean_ms,
        median_ms,
        serialized_bytes: None,
    }
}

/// Times sign/verify at the ring capacity of `pp` and commit/open, single
/// threaded. `iterations` trades precision for runtime; 30 is plenty for the
/// millisecond-scale bands asserted by the acceptance suite.
pub fn run_bench(pp: &PublicParams, iterations: usize) -> Result<Vec<BenchReport>, Error> {
    if iterations == 0 {
        return Err(Error::Usage("need at least one iteration".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(0xBE7C4);
    let admitters: Vec<_> = (0..pp.ring_capacity).map(|_| ukgen(pp, &mut rng)).collect();
    let ring = Ring::new(admitters.iter().map(|a| a.pk).collect()).unwrap();
    let auditor = okgen(pp, &mut rng);
    let message = b"benchmark message";

    let mut reports = Vec::new();

    let mut sig_holder: Option<RingSig> = None;
    {
        let mut rng = rng.clone();
        let mut report = measure(&format!("sign (ring of {})", pp.ring_capacity), iterations, || {
            let sig = ars::sign(pp, &auditor.opk, message, &ring, &admitters[0].sk, &mut rng)
                .expect("signing succeeds");
            sig_holder = Some(sig);
        });
        report.serialized_bytes = sig_holder.as_ref().map(|s| s.to_bytes().len());
        reports.push(report);
    }
    let sig = sig_holder.expect("signature produced");

    {
        let mut ok = true;
        let mut report = measure(
            &format!("verify (ring of {})", pp.ring_capacity),
            iterations,
            || {
                ok &= ars::verify(pp, &auditor.opk, message, &ring, &sig);
            },
        );
        assert!(ok, "benchmark signature must verify");
        report.serialized_bytes = Some(sig.to_bytes().len());
        reports.push(report);
    }

    let key = pp.commit_key();
    {
        let mut rng = rng.clone();
        let mut commitment = None;
        let mut report = measure("commit", iterations, || {
            let m = Scalar::random(&mut rng);
            commitment = Some(pedersen::commit(&key, m, &mut rng));
        });
        report.serialized_bytes = Some(32);
        reports.push(report);
    }
    {
        let m = Scalar::random(&mut rng);
        let (c, dec) = pedersen::commit(&key, m, &mut rng);
        let mut ok = true;
        let report = measure("com_open", iterations, || {
            ok &= pedersen::com_open(&key, &c, m, &Decommit(dec.0));
        });
        assert!(ok);
        reports.push(report);
    }

    Ok(reports)
}
