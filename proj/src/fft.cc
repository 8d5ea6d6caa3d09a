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

#include "hapredict/fft.h"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "hapredict/error.h"

namespace hapredict {
namespace {

struct Plans {
  fftw_plan forward;
  fftw_plan inverse;
};

// FFTW planning is not thread-safe; plans live for the process lifetime.
Plans GetPlans(int size) {
  static std::mutex mutex;
  static std::map<int, Plans> cache;
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(size); it != cache.end()) return it->second;

  std::vector<double> real(size);
  std::vector<std::complex<double>> spectrum(size / 2 + 1);
  auto* spec = reinterpret_cast<fftw_complex*>(spectrum.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  Plans plans{fftw_plan_dft_r2c_1d(size, real.data(), spec, flags),
              fftw_plan_dft_c2r_1d(size, spec, real.data(), flags)};
  if (plans.forward == nullptr || plans.inverse == nullptr) {
    throw Error(ErrorKind::kInvalidArgument, "FFTW planning failed");
  }
  cache.emplace(size, plans);
  return plans;
}

}  // namespace

RealFft::RealFft(int size) : size_(size) {
  if (size < 2 || size % 2 != 0) {
    throw Error(ErrorKind::kInvalidArgument, "FFT size must be even and >= 2");
  }
  const Plans plans = GetPlans(size);
  forward_plan_ = plans.forward;
  inverse_plan_ = plans.inverse;
}

void RealFft::Forward(std::span<const double> in,
                      std::span<std::complex<double>> out) const {
  // r2c does not modify its input; FFTW's signature is just not const.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_),
                       const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::Inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) const {
  // c2r overwrites its input.
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
  const double scale = 1.0 / size_;
  for (double& x : out) x *= scale;
}

}  // namespace hapredict
