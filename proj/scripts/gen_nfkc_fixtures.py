#!/usr/bin/env python3
"""Freeze normalization fixtures computed with Python's unicodedata.

Outputs:
  tests/data/nfkc_cases.jsonl       — {in, out} pairs (targeted + random)
  tests/data/nfkc_allcp_digest.json — digest over NFKC+lower of every code
                                      point, plus hash test vectors

Run from the repository root.
"""

import json
import random
import unicodedata as ud

M = 0xC6A4A7935BD1E995
R = 47
MASK = (1 << 64) - 1


def hash_bytes(data: bytes, seed: int = 0) -> int:
    acc = seed
    n = len(data)
    i = 0
    while i + 8 <= n:
        k = int.from_bytes(data[i:i + 8], "little")
        k = (k * M) & MASK
        k ^= k >> R
        k = (k * M) & MASK
        acc ^= k
        acc = (acc * M) & MASK
        i += 8
    if i < n:
        acc ^= int.from_bytes(data[i:n], "little")
        acc = (acc * M) & MASK
    acc ^= (n * M) & MASK
    acc ^= acc >> R
    acc = (acc * M) & MASK
    acc ^= acc >> R
    return acc


def norm(s: str) -> str:
    return ud.normalize("NFKC", s).lower()


TARGETED = [
    "",
    "abc",
    "ＡＢＣ",
    "ＡＢＣﬁ",
    "ﬁlter",
    "ﬂow ﬃ ﬄ",
    "Å Å Å",            # precomposed vs combining ring
    "é é É",
    "q̣̇ q̣̇",  # ccc reordering
    "ΑΣ ΣΑ Σ ΑΣ. ὈΔΥΣΣΕΎΣ",
    "İ İstanbul I ı",
    "ẞ ß",
    "Ⅷ ⅷ ① ㊵",
    "㈀ ㈁ ㌀ ㍿",
    "한국어 한 글",
    "각",      # jamo sequence composing to a syllable
    "Ω Ω K K",                # ohm/kelvin singletons
    "２０２４年 ｶﾀｶﾅ",
    "½ ¼ ⅓ №",
    "ʰello ᵖatent",
    "ﬆ ﬅ ﬀ",
    "ñ ñ Ñ",
    " space kinds　here",
    "ıİ",
]

POOLS = [
    (0x0020, 0x007E),   # ascii
    (0x00A0, 0x024F),   # latin supplement/extended
    (0x0300, 0x036F),   # combining marks
    (0x0370, 0x03FF),   # greek
    (0x1E00, 0x1EFF),   # latin extended additional
    (0x2000, 0x206F),   # punctuation
    (0x2100, 0x214F),   # letterlike
    (0x2460, 0x24FF),   # enclosed alphanumerics
    (0x30A0, 0x30FF),   # katakana
    (0x3200, 0x32FF),   # enclosed CJK
    (0xAC00, 0xD7A3),   # hangul
    (0xFB00, 0xFB4F),   # presentation ligatures
    (0xFF00, 0xFFEF),   # half/fullwidth
    (0x1D400, 0x1D7FF), # mathematical alphanumerics
]


def random_string(rng: random.Random) -> str:
    n = rng.randint(1, 24)
    cps = []
    for _ in range(n):
        lo, hi = POOLS[rng.randrange(len(POOLS))]
        cp = rng.randint(lo, hi)
        if 0xD800 <= cp <= 0xDFFF:
            cp = 0x41
        cps.append(chr(cp))
    return "".join(cps)


def main():
    rng = random.Random(20240809)
    cases = list(TARGETED) + [random_string(rng) for _ in range(3000)]
    with open("tests/data/nfkc_cases.jsonl", "w") as f:
        for s in cases:
            f.write(json.dumps({"in": s, "out": norm(s)}, ensure_ascii=True) + "\n")

    # digest over every code point: pins the full table set with one value
    h = 0
    count = 0
    acc = bytearray()
    digest_parts = []
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        acc += norm(chr(cp)).encode("utf-8") + b"\x00"
        count += 1
        if len(acc) > 1 << 20:
            digest_parts.append(bytes(acc))
            acc.clear()
    digest_parts.append(bytes(acc))
    h = hash_bytes(b"".join(digest_parts))

    vectors = [
        {"data": "", "seed": 0},
        {"data": "a", "seed": 0},
        {"data": "abcdefgh", "seed": 0},
        {"data": "abcdefghi", "seed": 1},
        {"data": "the quick brown fox jumps over the lazy dog", "seed": 42},
        {"data": "claim 1: a lens assembly comprising", "seed": 2024},
    ]
    for v in vectors:
        v["hash"] = hash_bytes(v["data"].encode("utf-8"), v["seed"])

    with open("tests/data/nfkc_allcp_digest.json", "w") as f:
        json.dump({
            "unicode_version": ud.unidata_version,
            "codepoints": count,
            "digest": h,
            "hash_vectors": vectors,
        }, f, indent=1)
    print(f"wrote {len(cases)} cases; all-cp digest {h:#018x} over {count} cps")


if __name__ == "__main__":
    main()
