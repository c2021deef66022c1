// src/text/unicode.cc

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

#include "pcasr/text/unicode.h"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "pcasr/error.h"

namespace pcasr::text {

std::u32string DecodeUtf8(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const int32_t length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    out.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
  }
  return out;
}

std::string EncodeUtf8(char32_t code_point) {
  char buf[U8_MAX_LENGTH];
  int32_t i = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<uint8_t*>(buf), i, U8_MAX_LENGTH,
            static_cast<UChar32>(code_point), error);
  if (error) return "\xEF\xBF\xBD";
  return std::string(buf, i);
}

std::string EncodeUtf8(std::u32string_view code_points) {
  std::string out;
  out.reserve(code_points.size());
  for (char32_t c : code_points) out += EncodeUtf8(c);
  return out;
}

std::string NfcNormalize(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  if (nfc->isNormalized(src, status) && U_SUCCESS(status)) {
    return std::string(utf8);
  }
  status = U_ZERO_ERROR;
  icu::UnicodeString dst = nfc->normalize(src, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  std::string out;
  dst.toUTF8String(out);
  return out;
}

std::string ToLower(std::string_view utf8) {
  std::u32string cps = DecodeUtf8(utf8);
  bool changed = false;
  for (char32_t& c : cps) {
    const char32_t lower = static_cast<char32_t>(u_tolower(static_cast<UChar32>(c)));
    changed |= lower != c;
    c = lower;
  }
  if (!changed) return std::string(utf8);
  return NfcNormalize(EncodeUtf8(cps));
}

std::string CapitalizeFirst(std::string_view utf8) {
  std::u32string cps = DecodeUtf8(utf8);
  for (char32_t& c : cps) {
    if (IsAlphabetic(c)) {
      c = static_cast<char32_t>(u_toupper(static_cast<UChar32>(c)));
      break;
    }
  }
  return NfcNormalize(EncodeUtf8(cps));
}

bool IsWhitespace(char32_t c) {
  return u_isUWhiteSpace(static_cast<UChar32>(c));
}

bool IsAlphabetic(char32_t c) {
  return u_isUAlphabetic(static_cast<UChar32>(c));
}

bool IsUppercase(char32_t c) {
  const auto cp = static_cast<UChar32>(c);
  return u_isUUppercase(cp) || u_istitle(cp);
}

}  // namespace pcasr::text
