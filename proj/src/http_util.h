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

#ifndef HAPREDICT_SRC_HTTP_UTIL_H_
#define HAPREDICT_SRC_HTTP_UTIL_H_

#include <string>

namespace hapredict::internal {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/'
};

// Throws Error(kConfig) for anything but http:// or https:// URLs.
SplitUrl SplitHttpUrl(const std::string& url);

}  // namespace hapredict::internal

#endif  // HAPREDICT_SRC_HTTP_UTIL_H_
