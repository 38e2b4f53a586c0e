//! Exact oracles shared by the integration suites. Nothing here calls into
//! the state-vector simulator: transition probabilities between MUB vectors
//! come from the unbiasedness relation alone (same basis: delta on the
//! vector index, different basis: 1/d).

#![allow(dead_code)]

use num_rational::Ratio;

pub type Q = Ratio<i128>;

/// Probability that measuring `M_{l,b}` in basis `e` yields `o`.
pub fn transition(d: u32, l: u32, b: u32, e: u32, o: u32) -> Q {
    if b == e {
        if l == o {
            Q::from_integer(1)
        } else {
            Q::from_integer(0)
        }
    } else {
        Q::new(1, d as i128)
    }
}

/// Distribution of `(Σx, Σy) mod d` over `parties` independent uniform
/// parties, by enumerating every tuple. Index `[sx][sy]`.
pub fn sum_distribution(d: u32, parties: usize) -> Vec<Vec<Q>> {
    let n = d as usize;
    let mut counts = vec![vec![0i128; n]; n];
    let total = n.pow(2 * parties as u32);
    for code in 0..total {
        let mut c = code;
        let (mut sx, mut sy) = (0usize, 0usize);
        for _ in 0..parties {
            sx = (sx + c % n) % n;
            c /= n;
            sy = (sy + c % n) % n;
            c /= n;
        }
        counts[sx][sy] += 1;
    }
    counts
        .into_iter()
        .map(|row| row.into_iter().map(|k| Q::new(k, total as i128)).collect())
        .collect()
}

/// Exact probability that a valid check round fails when Eve intercepts on
/// `link` (1..=n_recipients+1) measuring in a uniformly random basis and
/// forwarding the collapsed vector.
pub fn intercept_resend_detection(d: u32, n_recipients: usize, link: usize) -> Q {
    let up = sum_distribution(d, link);
    let down = sum_distribution(d, n_recipients + 1 - link);
    let eve_basis = Q::new(1, d as i128);
    let basis_prior = Q::new(1, d as i128);
    let mut valid = Q::from_integer(0);
    let mut fail = Q::from_integer(0);
    for l in 0..d {
        for b in 0..d {
            let pu = up[l as usize][b as usize];
            for xr in 0..d {
                for yr in 0..d {
                    let pd = down[xr as usize][yr as usize];
                    let sum_x = (l + xr) % d;
                    let sum_y = (b + yr) % d;
                    for big_j in 0..d {
                        let w = pu * pd * basis_prior;
                        if big_j != sum_y {
                            continue;
                        }
                        valid += w;
                        for e in 0..d {
                            for o in 0..d {
                                let pe = transition(d, l, b, e, o);
                                // forwarded M_{o,e} then downstream shifts
                                let (fl, fb) = ((o + xr) % d, (e + yr) % d);
                                for a in 0..d {
                                    let pa = transition(d, fl, fb, big_j, a);
                                    if a != sum_x {
                                        fail += w * eve_basis * pe * pa;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    fail / valid
}

/// Exact probability that a valid check round fails under the
/// substitute-qudit attack: the distributor measures its own untouched
/// `M_{x1,y1}` in basis `J = Σy`.
pub fn substitute_detection(d: u32, n_recipients: usize) -> Q {
    let rec = sum_distribution(d, n_recipients);
    let prior = Q::new(1, (d * d * d) as i128);
    let mut valid = Q::from_integer(0);
    let mut fail = Q::from_integer(0);
    for x1 in 0..d {
        for y1 in 0..d {
            for xs in 0..d {
                for ys in 0..d {
                    let pr = rec[xs as usize][ys as usize];
                    for big_j in 0..d {
                        if big_j != (y1 + ys) % d {
                            continue;
                        }
                        let w = prior * pr;
                        valid += w;
                        for a in 0..d {
                            if a != (x1 + xs) % d {
                                fail += w * transition(d, x1, y1, big_j, a);
                            }
                        }
                    }
                }
            }
        }
    }
    fail / valid
}

pub fn three_sigma(hits: usize, trials: usize, p: f64) -> bool {
    let n = trials as f64;
    let sd = (n * p * (1.0 - p)).sqrt();
    (hits as f64 - n * p).abs() <= 3.0 * sd
}
