#!/usr/bin/env python3
# Copyright 2026 The genebench Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates src/unicode_tables.cpp from Python's unicodedata."""

import sys
import unicodedata

HEADER = """// Copyright 2026 The genebench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Generated by tools/gen_unicode_tables.py. Do not edit.
"""


def ranges(pred):
    out = []
    start = None
    for cp in range(0x110000):
        hit = pred(cp)
        if hit and start is None:
            start = cp
        elif not hit and start is not None:
            out.append((start, cp - 1))
            start = None
    if start is not None:
        out.append((start, 0x10FFFF))
    return out


def is_punct(cp):
    return unicodedata.category(chr(cp)).startswith("P")


def is_space(cp):
    return cp in (0x09, 0x0A, 0x0B, 0x0C, 0x0D, 0x85) or \
        unicodedata.category(chr(cp)) in ("Zs", "Zl", "Zp")


def lower_pairs():
    pairs = []
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        low = chr(cp).lower()
        if len(low) == 1 and ord(low) != cp:
            pairs.append((cp, ord(low)))
    return pairs


def emit_ranges(name, rs):
    lines = [f"const CodepointRange {name}[] = {{"]
    for a, b in rs:
        lines.append(f"    {{0x{a:04X}, 0x{b:04X}}},")
    lines.append("};")
    return "\n".join(lines)


def main():
    out = [HEADER, f"// Unicode version {unicodedata.unidata_version}.", "",
           '#include "genebench/unicode.hpp"', "",
           "namespace genebench::unicode::detail {", ""]
    out.append(emit_ranges("kPunctuation", ranges(is_punct)))
    out.append("")
    out.append(emit_ranges("kWhitespace", ranges(is_space)))
    out.append("")
    out.append("const LowerMapping kLowercase[] = {")
    for a, b in lower_pairs():
        out.append(f"    {{0x{a:04X}, 0x{b:04X}}},")
    out.append("};")
    out.append("")
    out.append("const std::size_t kPunctuationSize = std::size(kPunctuation);")
    out.append("const std::size_t kWhitespaceSize = std::size(kWhitespace);")
    out.append("const std::size_t kLowercaseSize = std::size(kLowercase);")
    out.append(f'const char kUnicodeVersion[] = "{unicodedata.unidata_version}";')
    out.append("")
    out.append("}  // namespace genebench::unicode::detail")
    sys.stdout.write("\n".join(out) + "\n")


if __name__ == "__main__":
    main()
