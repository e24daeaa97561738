#!/usr/bin/env python3
"""Generate newform fixture files with PARI/GP (via the `cypari` wheel).

This is the offline counterpart of `mcpoint fetch`: it computes the weight-2,
trivial-character newspaces of the requested levels and writes them in the
canonical fixture layout read by `mcpoint-core`.

Every level is cross-checked before it is written:
  * the orbit dimensions add up to dim S_2^new(Gamma_0(N));
  * for every stored prime p, the traces of the per-orbit characteristic
    polynomials of T_p add up to the p-th coefficient of the trace form,
    which PARI computes through the trace formula (an independent route);
  * Atkin-Lehner eigenvalues are constant on each Galois orbit.

Usage:
    python3 generate.py --levels 1-1000 --out fixtures/corpus/levels_0001_1000.json
    python3 generate.py --levels 49,98,147,294 --cover 1,2,3,6 --out ex.json
"""

import argparse
import sys

from cypari import pari

PRIMES = [2, 3, 5, 7, 11, 13, 17, 19]
SORT_TRACES = 100


def parse_levels(text):
    out = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-")
            out.update(range(int(lo), int(hi) + 1))
        else:
            out.add(int(part))
    return sorted(out)


def factor(n):
    if n == 1:
        return []
    f = pari.factor(n)
    return [(int(p), int(e)) for p, e in zip(f[0], f[1])]


def suffix(i):
    # LMFDB orbit letters: a..z, ba, bb, ...
    if i == 0:
        return "a"
    digits = []
    while i > 0:
        digits.append(chr(ord("a") + i % 26))
        i //= 26
    return "".join(reversed(digits))


def int_list(poly):
    # ascending coefficients of a PARI polynomial in x
    deg = int(pari.poldegree(poly))
    return [int(pari.polcoef(poly, i)) for i in range(deg + 1)]


def newspace(level):
    mf = pari(f"mfinit([{level},2],0)")
    total = int(pari.mfdim(mf))
    if total == 0:
        return []
    forms = pari.mfeigenbasis(mf)
    fields = pari.mffields(mf)
    bad = [p for p, _ in factor(level)]
    primes = [p for p in PRIMES if p not in bad]
    al = {p ** e: pari.mfatkineigenvalues(mf, p ** e) for p, e in factor(level)}
    n_max = max(SORT_TRACES, max(PRIMES))
    trace_form = pari.mfcoefs(pari(f"mftraceform([{level},2],0)"), max(PRIMES))

    orbits = []
    for i, form in enumerate(forms):
        field = fields[i]
        dim = int(pari.poldegree(field))
        coefs = pari.mfcoefs(form, n_max)
        if dim == 1:
            traces = [int(coefs[n]) for n in range(1, SORT_TRACES + 1)]
        else:
            traces = [
                int(pari.trace(pari(f"Mod(lift({coefs[n]}), {field})")))
                for n in range(1, SORT_TRACES + 1)
            ]
        charpolys = {}
        for p in primes:
            cp = pari(f"charpoly(Mod(lift({coefs[p]}), {field}))")
            charpolys[p] = int_list(cp)
        signs = []
        for q in sorted(al):
            ev = [int(x) for x in al[q][i]]
            if len(set(ev)) != 1 or ev[0] not in (1, -1):
                raise SystemExit(f"level {level}: AL eigenvalues of W_{q} not constant on orbit {i}: {ev}")
            signs.append([q, ev[0]])
        orbits.append({"dim": dim, "traces": traces, "al": signs, "cp": charpolys})

    if sum(o["dim"] for o in orbits) != total:
        raise SystemExit(f"level {level}: orbit dimensions do not add up to {total}")
    for p in primes:
        # trace of T_p over the newspace, via the trace formula
        expected = int(trace_form[p])
        got = sum(-o["cp"][p][o["dim"] - 1] for o in orbits)
        if got != expected:
            raise SystemExit(f"level {level}: trace of T_{p} is {got}, trace form says {expected}")

    orbits.sort(key=lambda o: (o["dim"], o["traces"]))
    records = []
    for i, o in enumerate(orbits):
        records.append({
            "label": f"{level}.2.a.{suffix(i)}",
            "level": level,
            "dim": o["dim"],
            "al_signs": o["al"],
            "hecke_charpolys": o["cp"],
        })
    return records


def record_line(r):
    al = ",".join(f"[{q},{s}]" for q, s in r["al_signs"])
    cps = ",".join(
        '"%d":[%s]' % (p, ",".join(str(c) for c in r["hecke_charpolys"][p]))
        for p in sorted(r["hecke_charpolys"])
    )
    return (
        '{"label":"%s","level":%d,"dim":%d,"al_signs":[%s],"al_extended":[],"hecke_charpolys":{%s}}'
        % (r["label"], r["level"], r["dim"], al, cps)
    )


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--levels", required=True)
    ap.add_argument("--cover", default="", help="extra levels to compute and declare covered")
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    pari.allocatemem(4 * 10 ** 9)
    levels = sorted(set(parse_levels(args.levels)) | set(parse_levels(args.cover)))
    records = []
    for n in levels:
        recs = newspace(n)
        records.extend(recs)
        print(f"level {n}: {len(recs)} orbits", file=sys.stderr)

    def key(r):
        s = r["label"].rsplit(".", 1)[1]
        return (r["level"], len(s), s)

    records.sort(key=key)
    with open(args.out, "w") as fh:
        fh.write('{"schema_version":1,"coverage":[%s],"records":[\n' % ",".join(str(n) for n in levels))
        fh.write(",\n".join(record_line(r) for r in records))
        if records:
            fh.write("\n")
        fh.write("]}\n")


if __name__ == "__main__":
    main()
