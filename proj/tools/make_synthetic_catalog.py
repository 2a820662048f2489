#!/usr/bin/env python3
"""Writes the synthetic TLE catalog and the test fixtures.

Element sets are drawn from fixed seeds so the files are reproducible:
    python3 tools/make_synthetic_catalog.py
"""
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def checksum(line):
    total = 0
    for c in line[:68]:
        if c.isdigit():
            total += int(c)
        elif c == "-":
            total += 1
    return total % 10


def tle(name, norad, intl, epoch_day, inc, raan, ecc, argp, ma, n, rev, elset=999):
    l1 = (f"1 {norad:05d}U {intl:<8s} 18{epoch_day:012.8f}  .00000012  00000-0  10000-4 0 "
          f"{elset:4d}")
    l2 = (f"2 {norad:05d} {inc:8.4f} {raan:8.4f} {round(ecc * 1e7):07d} {argp:8.4f} {ma:8.4f} "
          f"{n:11.8f}{rev:5d}")
    assert len(l1) == 68 and len(l2) == 68, (l1, l2)
    l1 += str(checksum(l1))
    l2 += str(checksum(l2))
    return [f"0 {name}", l1, l2]


def leo(rng, i):
    return dict(inc=rng.choice([51.6, 53.0, 86.4, 97.6, 98.2]) + rng.uniform(-0.5, 0.5),
                raan=rng.uniform(0, 360), ecc=rng.uniform(0.0001, 0.002),
                argp=rng.uniform(0, 360), ma=rng.uniform(0, 360), n=rng.uniform(14.1, 15.5))


def meo(rng, i):
    return dict(inc=rng.uniform(54.5, 56.5), raan=((i % 6) * 60 + rng.uniform(-2, 2)) % 360,
                ecc=rng.uniform(0.001, 0.012), argp=rng.uniform(0, 360),
                ma=rng.uniform(0, 360), n=2.0056 + rng.uniform(-0.0005, 0.0005))


def geo(rng, i):
    return dict(inc=rng.uniform(0.0, 0.1) if i % 4 else rng.uniform(0.5, 4.0),
                raan=rng.uniform(0, 360), ecc=rng.uniform(0.0001, 0.0006),
                argp=rng.uniform(0, 360), ma=rng.uniform(0, 360),
                n=1.00273791 + rng.uniform(-0.0003, 0.0003))


def heo(rng, i):
    return dict(inc=63.4 + rng.uniform(-0.3, 0.3), raan=rng.uniform(0, 360),
                ecc=rng.uniform(0.68, 0.74), argp=270 + rng.uniform(-3, 3),
                ma=rng.uniform(0, 360), n=2.0059 + rng.uniform(-0.0008, 0.0008))


def catalog():
    rng = random.Random(20180425)
    lines = []
    norad = 40001
    for label, count, gen in (("LEO", 120, leo), ("MEO", 32, meo), ("GEO", 60, geo),
                              ("HEO", 16, heo)):
        for i in range(count):
            e = gen(rng, i)
            lines += tle(f"SYN-{label}-{i + 1:03d}", norad, f"18{i + 1:03d}A",
                         115.5 + rng.uniform(-0.4, 0.4), e["inc"], e["raan"], e["ecc"],
                         e["argp"], e["ma"], e["n"], rng.randint(1, 9999))
            norad += 1
    return lines


NEOSSAT = [
    "0 NEOSSAT                 ",
    "1 39089U 13009D   18115.60454839 +.00000035 +00000-0 +27923-4 0  9992",
    "2 39089 098.5303 320.4424 0012356 092.9866 267.2733 14.34421818270178",
]


def four_sats():
    specs = [  # inc, raan, ma
        (51.6, 0.0, 0.0), (97.6, 90.0, 120.0), (53.0, 200.0, 240.0), (86.4, 300.0, 60.0)]
    lines = []
    for k, (inc, raan, ma) in enumerate(specs):
        lines += tle(f"FIXTURE-{k + 1}", 50001 + k, f"18{k + 1:03d}A", 115.5, inc, raan, 0.0005,
                     90.0, ma, 14.8, 100 + k)
    return lines


def corrupt():
    rng = random.Random(7)
    lines = []
    for i in range(10):
        e = leo(rng, i)
        block = tle(f"CHECK-{i + 1:02d}", 60001 + i, f"18{i + 1:03d}A", 115.5, e["inc"],
                    e["raan"], e["ecc"], e["argp"], e["ma"], e["n"], 10 + i)
        if i in (3, 7):
            bad = (int(block[2][-1]) + 1) % 10
            block[2] = block[2][:-1] + str(bad)
        lines += block
    return lines


def write(path, lines):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    write(ROOT / "data" / "synthetic_catalog.tle", catalog())
    write(ROOT / "tests" / "data" / "neossat.tle", NEOSSAT)
    write(ROOT / "tests" / "data" / "four_sats.tle", four_sats())
    write(ROOT / "tests" / "data" / "corrupt_checksums.tle", corrupt())
    write(ROOT / "tests" / "data" / "empty.tle", [])
