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

#ifndef HAPREDICT_RATE_LIMIT_H_
#define HAPREDICT_RATE_LIMIT_H_

#include <chrono>
#include <condition_variable>
#include <mutex>

namespace hapredict {

// Bounds concurrent requests to one backend and, optionally, their start
// rate through a token bucket.
class BackendGate {
 public:
  // rate_per_s <= 0 disables the bucket.
  explicit BackendGate(int max_concurrency, double rate_per_s = 0.0,
                       double burst = 1.0);

  BackendGate(const BackendGate&) = delete;
  BackendGate& operator=(const BackendGate&) = delete;

  class Permit {
   public:
    explicit Permit(BackendGate& gate) : gate_(&gate) { gate_->Acquire(); }
    ~Permit() { gate_->Release(); }
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;

   private:
    BackendGate* gate_;
  };

  int max_concurrency() const { return max_concurrency_; }
  int in_flight() const;

 private:
  void Acquire();
  void Release();
  void TakeToken();

  const int max_concurrency_;
  const double rate_per_s_;
  const double burst_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;

  std::mutex bucket_mu_;
  double tokens_;
  std::chrono::steady_clock::time_point last_refill_;
};

}  // namespace hapredict

#endif  // HAPREDICT_RATE_LIMIT_H_
