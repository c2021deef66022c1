// pcasr/text/unicode.h

// Copyright 2026  The pcasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PCASR_TEXT_UNICODE_H_
#define PCASR_TEXT_UNICODE_H_

#include <string>
#include <string_view>
#include <vector>

namespace pcasr::text {

// UTF-8 helpers backed by ICU. Invalid byte sequences decode to U+FFFD.
std::u32string DecodeUtf8(std::string_view utf8);
std::string EncodeUtf8(std::u32string_view code_points);
std::string EncodeUtf8(char32_t code_point);

// Canonical composition (NFC).
std::string NfcNormalize(std::string_view utf8);

// Locale-independent simple case mapping per code point, result in NFC.
std::string ToLower(std::string_view utf8);
// Uppercases the first alphabetic code point only.
std::string CapitalizeFirst(std::string_view utf8);

bool IsWhitespace(char32_t c);
bool IsAlphabetic(char32_t c);
bool IsUppercase(char32_t c);

}  // namespace pcasr::text

#endif  // PCASR_TEXT_UNICODE_H_
