// Copyright 2026 The hapredict Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hapredict/hash.h"

#include <openssl/evp.h>

#include <array>
#include <memory>

#include "hapredict/error.h"

namespace hapredict {
namespace {

class Digest {
 public:
  Digest() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error(ErrorKind::kInvalidArgument, "SHA-256 unavailable");
    }
  }

  void Update(const void* data, size_t size) {
    EVP_DigestUpdate(ctx_.get(), data, size);
  }

  std::string HexDigest() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(kHex[md[i] >> 4]);
      out.push_back(kHex[md[i] & 0xf]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string Sha256Hex(std::span<const uint8_t> bytes) {
  Digest d;
  d.Update(bytes.data(), bytes.size());
  return d.HexDigest();
}

std::string Sha256Hex(std::string_view text) {
  Digest d;
  d.Update(text.data(), text.size());
  return d.HexDigest();
}

std::string Sha256Fields(std::initializer_list<std::string_view> fields) {
  Digest d;
  for (std::string_view f : fields) {
    const std::string len = std::to_string(f.size()) + ":";
    d.Update(len.data(), len.size());
    d.Update(f.data(), f.size());
  }
  return d.HexDigest();
}

}  // namespace hapredict
