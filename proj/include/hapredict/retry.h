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

#ifndef HAPREDICT_RETRY_H_
#define HAPREDICT_RETRY_H_

#include <functional>
#include <stdexcept>
#include <string>

namespace hapredict {

// Connection refused, timeouts and the like. Only these are retried; an
// answer from the backend, good or bad, never is.
class TransportFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RetryPolicy {
  double base_delay_s = 1.0;
  double factor = 2.0;
  // Replaced in tests to observe delays without waiting.
  std::function<void(double seconds)> sleep;
};

// Calls `attempt` up to 1 + max_retries times, sleeping base, base*factor,
// ... between transport failures. Rethrows the last TransportFailure.
template <typename F>
auto WithRetries(const RetryPolicy& policy, int max_retries, F&& attempt)
    -> decltype(attempt()) {
  double delay = policy.base_delay_s;
  for (int i = 0;; ++i) {
    try {
      return attempt();
    } catch (const TransportFailure&) {
      if (i >= max_retries) throw;
    }
    if (policy.sleep) policy.sleep(delay);
    delay *= policy.factor;
  }
}

void SleepSeconds(double seconds);

// Policy with real sleeps.
RetryPolicy DefaultRetryPolicy();

}  // namespace hapredict

#endif  // HAPREDICT_RETRY_H_
