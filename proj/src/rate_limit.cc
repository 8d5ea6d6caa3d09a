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

#include "hapredict/rate_limit.h"

#include <algorithm>
#include <thread>

#include "hapredict/error.h"

namespace hapredict {

BackendGate::BackendGate(int max_concurrency, double rate_per_s, double burst)
    : max_concurrency_(max_concurrency),
      rate_per_s_(rate_per_s),
      burst_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      last_refill_(std::chrono::steady_clock::now()) {
  if (max_concurrency < 1) {
    throw Error(ErrorKind::kConfig, "max_concurrency must be >= 1");
  }
}

int BackendGate::in_flight() const {
  std::lock_guard lock(mu_);
  return in_flight_;
}

void BackendGate::Acquire() {
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < max_concurrency_; });
    ++in_flight_;
  }
  if (rate_per_s_ > 0.0) TakeToken();
}

void BackendGate::Release() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  cv_.notify_one();
}

void BackendGate::TakeToken() {
  std::unique_lock lock(bucket_mu_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_refill_).count();
    tokens_ = std::min(burst_, tokens_ + elapsed * rate_per_s_);
    last_refill_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    // Sleeping with the lock held keeps waiters roughly in arrival order.
    std::this_thread::sleep_for(
        std::chrono::duration<double>((1.0 - tokens_) / rate_per_s_));
  }
}

}  // namespace hapredict
