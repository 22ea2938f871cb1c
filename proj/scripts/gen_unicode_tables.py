#!/usr/bin/env python3
"""Regenerate src/unicode_tables.cpp from the Python unicodedata database.

Emits flattened NFKD decompositions (Hangul excluded, handled
algorithmically), canonical combining classes, canonical composition pairs,
lowercase mappings and the cased / case-ignorable sets needed for the
final-sigma rule. Run from the repository root:

    python3 scripts/gen_unicode_tables.py
"""

import sys
import unicodedata as ud

MAX_CP = 0x110000
SURROGATES = range(0xD800, 0xE000)
HANGUL_S = range(0xAC00, 0xAC00 + 11172)


def gen_decomp():
    entries = []  # (cp, [cps])
    for cp in range(MAX_CP):
        if cp in SURROGATES or cp in HANGUL_S:
            continue
        c = chr(cp)
        d = ud.normalize("NFKD", c)
        if d != c:
            entries.append((cp, [ord(x) for x in d]))
    return entries


def gen_ccc():
    out = []
    for cp in range(MAX_CP):
        if cp in SURROGATES:
            continue
        k = ud.combining(chr(cp))
        if k:
            out.append((cp, k))
    return out


def gen_comp_pairs():
    pairs = []
    for cp in range(MAX_CP):
        if cp in SURROGATES or cp in HANGUL_S:
            continue
        c = chr(cp)
        d = ud.decomposition(c)
        if not d or d.startswith("<"):
            continue  # compatibility decompositions never recompose
        parts = d.split()
        if len(parts) != 2:
            continue
        l, r = int(parts[0], 16), int(parts[1], 16)
        # normalize() applies the composition-exclusion list for us
        if ud.normalize("NFC", chr(l) + chr(r)) == c:
            pairs.append((l, r, cp))
    pairs.sort(key=lambda t: (t[0], t[1]))
    return pairs


def gen_lower():
    out = []
    for cp in range(MAX_CP):
        if cp in SURROGATES:
            continue
        c = chr(cp)
        lo = c.lower()
        if lo != c and len(lo) == 1:
            out.append((cp, ord(lo)))
        # U+0130 (the only multi-char lowering) is special-cased in C++
    return out


def is_cased(c):
    # final sigma becomes 'ς' only when preceded (modulo ignorables) by a
    # cased character; probing CPython reproduces its exact predicate
    return (". " + c + "Σ").lower().endswith("ς")


def is_case_ignorable(c):
    if is_cased(c):
        return False
    return ("A" + c + "Σ").lower().endswith("ς")


def to_ranges(cps):
    ranges = []
    start = prev = None
    for cp in cps:
        if start is None:
            start = prev = cp
        elif cp == prev + 1:
            prev = cp
        else:
            ranges.append((start, prev))
            start = prev = cp
    if start is not None:
        ranges.append((start, prev))
    return ranges


def main():
    # sanity-check the probes against well-known property values
    assert is_cased("A") and is_cased("a") and not is_cased(".")
    assert is_case_ignorable("́") and is_case_ignorable("'")
    assert not is_case_ignorable("A") and not is_case_ignorable(" ")

    decomp = gen_decomp()
    ccc = gen_ccc()
    comp = gen_comp_pairs()
    lower = gen_lower()
    cased = to_ranges([cp for cp in range(MAX_CP)
                       if cp not in SURROGATES and is_cased(chr(cp))])
    ignorable = to_ranges([cp for cp in range(MAX_CP)
                           if cp not in SURROGATES and is_case_ignorable(chr(cp))])

    pool = []
    dec_idx = []
    for cp, seq in decomp:
        dec_idx.append((cp, len(pool), len(seq)))
        pool.extend(seq)

    w = sys.stdout
    out_path = "src/unicode_tables.cpp"
    with open(out_path, "w") as w:
        w.write("// Generated by scripts/gen_unicode_tables.py — do not edit.\n")
        w.write(f"// Unicode {ud.unidata_version} (CPython {sys.version.split()[0]}).\n\n")
        w.write('#include "unicode_tables.hpp"\n\n')
        w.write("namespace patcorp::uni {\n\n")

        w.write(f"const DecompEntry kDecomp[] = {{\n")
        for cp, off, n in dec_idx:
            w.write(f"  {{0x{cp:X}, {off}, {n}}},\n")
        w.write("};\n")
        w.write(f"const std::size_t kDecompCount = {len(dec_idx)};\n\n")

        w.write("const char32_t kDecompPool[] = {\n")
        for i in range(0, len(pool), 12):
            w.write("  " + ", ".join(f"0x{x:X}" for x in pool[i:i + 12]) + ",\n")
        w.write("};\n\n")

        w.write("const CccEntry kCcc[] = {\n")
        for cp, k in ccc:
            w.write(f"  {{0x{cp:X}, {k}}},\n")
        w.write("};\n")
        w.write(f"const std::size_t kCccCount = {len(ccc)};\n\n")

        w.write("const CompEntry kComp[] = {\n")
        for l, r, c in comp:
            w.write(f"  {{0x{l:X}, 0x{r:X}, 0x{c:X}}},\n")
        w.write("};\n")
        w.write(f"const std::size_t kCompCount = {len(comp)};\n\n")

        w.write("const LowerEntry kLower[] = {\n")
        for cp, lo in lower:
            w.write(f"  {{0x{cp:X}, 0x{lo:X}}},\n")
        w.write("};\n")
        w.write(f"const std::size_t kLowerCount = {len(lower)};\n\n")

        w.write("const CpRange kCased[] = {\n")
        for a, b in cased:
            w.write(f"  {{0x{a:X}, 0x{b:X}}},\n")
        w.write("};\n")
        w.write(f"const std::size_t kCasedCount = {len(cased)};\n\n")

        w.write("const CpRange kCaseIgnorable[] = {\n")
        for a, b in ignorable:
            w.write(f"  {{0x{a:X}, 0x{b:X}}},\n")
        w.write("};\n")
        w.write(f"const std::size_t kCaseIgnorableCount = {len(ignorable)};\n\n")

        w.write("}  // namespace patcorp::uni\n")

    print(f"wrote {out_path}: {len(dec_idx)} decomps ({len(pool)} pool cps), "
          f"{len(ccc)} ccc, {len(comp)} comp pairs, {len(lower)} lower, "
          f"{len(cased)} cased ranges, {len(ignorable)} ignorable ranges")


if __name__ == "__main__":
    main()
