use booth_tiling::booth::{build_booth, build_booth_array, BoothArraySpec};
use booth_tiling::netlist::Netlist;
use booth_tiling::tileset::{catalog_entry, TileKind, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Booth array with independent operand signedness, output restored to a
/// plain word.
fn array(k: u32, h: u32, xs: bool, ys: bool, mac: bool) -> Netlist {
    let mut net = Netlist::new();
    let x = net.add_input("X", k, xs);
    let y = net.add_input("Y", h, ys);
    let d = mac.then(|| net.add_input("D", k, xs));
    let b = build_booth(&mut net, &x, xs, &y, ys, d.as_deref());
    let mut p = b.bits.clone();
    if b.msb_complemented {
        let m = p.pop().unwrap();
        let inv = net.lut1(vec![m], 0b01);
        p.push(inv);
    }
    net.set_output("P", p, xs || ys);
    net
}

fn range(w: u32, signed: bool) -> std::ops::RangeInclusive<i128> {
    if signed {
        -(1i128 << (w - 1))..=(1i128 << (w - 1)) - 1
    } else {
        0..=(1i128 << w) - 1
    }
}

fn heights(levels: u32, ys: bool) -> Vec<u32> {
    if ys {
        vec![2 * levels - 1, 2 * levels]
    } else {
        vec![2 * levels - 1]
    }
}

#[test]
fn exhaustive_small_arrays() {
    for levels in 3..=4 {
        for k in 2..=8u32 {
            for (xs, ys) in [(false, false), (true, false), (false, true), (true, true)] {
                for h in heights(levels, ys) {
                    if k + h > 15 {
                        continue;
                    }
                    let net = array(k, h, xs, ys, false);
                    let mut vecs = Vec::new();
                    let mut expect = Vec::new();
                    for a in range(k, xs) {
                        for b in range(h, ys) {
                            vecs.push(net.encode_inputs(&[a, b]).unwrap());
                            expect.push(a * b);
                        }
                    }
                    let got = net.simulate_batch(&vecs).unwrap();
                    for (i, raw) in got.into_iter().enumerate() {
                        assert_eq!(net.decode_output(raw), expect[i], "L{levels} k{k} h{h} xs{xs} ys{ys} case {i}");
                    }
                }
            }
        }
    }
}

#[test]
fn exhaustive_signed_8x8() {
    let f = build_booth_array(BoothArraySpec { levels: 4, x_width: 8, signed: true, mac: false }).unwrap();
    let mut vecs = Vec::new();
    let mut expect = Vec::new();
    for a in -128i128..128 {
        for b in -128i128..128 {
            vecs.push(f.netlist.encode_inputs(&[a, b]).unwrap());
            expect.push(a * b);
        }
    }
    assert_eq!(vecs.len(), 65_536);
    let got = f.netlist.simulate_batch(&vecs).unwrap();
    for (raw, e) in got.into_iter().zip(expect) {
        assert_eq!(f.netlist.decode_output(raw), e);
    }
}

#[test]
fn random_arrays_up_to_16_bits_with_mac() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for levels in 3..=6 {
        for k in [9u32, 12, 16] {
            for (xs, ys) in [(false, false), (true, true), (true, false), (false, true)] {
                for mac in [false, true] {
                    for h in heights(levels, ys) {
                        let net = array(k, h, xs, ys, mac);
                        let (rx, ry) = (range(k, xs), range(h, ys));
                        let mut vecs = Vec::new();
                        let mut expect = Vec::new();
                        for _ in 0..10_000 {
                            let a = rng.gen_range(rx.clone());
                            let b = rng.gen_range(ry.clone());
                            let mut vals = vec![a, b];
                            let mut e = a * b;
                            if mac {
                                let d = rng.gen_range(rx.clone());
                                vals.push(d);
                                e += d;
                            }
                            vecs.push(net.encode_inputs(&vals).unwrap());
                            expect.push(e);
                        }
                        let got = net.simulate_batch(&vecs).unwrap();
                        for (raw, e) in got.into_iter().zip(expect) {
                            assert_eq!(net.decode_output(raw), e, "L{levels} k{k} h{h} xs{xs} ys{ys} mac{mac}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn mac_extremes() {
    for levels in 3..=6 {
        for k in 2..=8u32 {
            for signed in [false, true] {
                let spec = BoothArraySpec { levels, x_width: k, signed, mac: true };
                let f = build_booth_array(spec).unwrap();
                let (rx, ry) = (range(k, signed), range(spec.height(), signed));
                for a in [*rx.start(), *rx.end()] {
                    for b in [*ry.start(), *ry.end()] {
                        for d in [*rx.start(), *rx.end()] {
                            assert_eq!(f.netlist.simulate_values(&[a, b, d]).unwrap(), a * b + d);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn mac_disabled_matches_zero_addend() {
    for signed in [false, true] {
        let plain = build_booth_array(BoothArraySpec { levels: 3, x_width: 6, signed, mac: false }).unwrap();
        let mac = build_booth_array(BoothArraySpec { levels: 3, x_width: 6, signed, mac: true }).unwrap();
        let h = plain.spec.height();
        for a in range(6, signed) {
            for b in range(h, signed) {
                assert_eq!(
                    plain.netlist.simulate_values(&[a, b]).unwrap(),
                    mac.netlist.simulate_values(&[a, b, 0]).unwrap()
                );
            }
        }
    }
}

#[test]
fn structure_matches_cost_model() {
    for levels in 3..=6 {
        for k in 2..=24 {
            for signed in [false, true] {
                let spec = BoothArraySpec { levels, x_width: k, signed, mac: false };
                let f = build_booth_array(spec).unwrap();
                let kind = TileKind::normal(Variant::BoothArray { levels, k, signed }).unwrap();
                let (shape, cost) = catalog_entry(&kind).unwrap();
                assert_eq!(f.array_luts() as i64 * 100, cost.lut_mult.hundredths());
                assert_eq!(f.bits.bits.len() as u32, cost.w_out);
                assert_eq!(shape.height, spec.height());
                assert!(f.netlist.diagnostics().logic_depth >= levels);
            }
            let u = BoothArraySpec { levels, x_width: k, signed: false, mac: false };
            let s = BoothArraySpec { signed: true, ..u };
            assert_eq!(s.height(), u.height() + 1);
        }
    }
}
