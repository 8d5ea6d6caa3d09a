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

#ifndef HAPREDICT_FFT_H_
#define HAPREDICT_FFT_H_

#include <complex>
#include <span>
#include <vector>

namespace hapredict {

// Real FFT of a fixed size backed by FFTW. Instances are cheap handles onto
// a process-wide plan cache; Forward/Inverse are safe to call concurrently.
class RealFft {
 public:
  explicit RealFft(int size);

  int size() const { return size_; }
  int num_bins() const { return size_ / 2 + 1; }

  // in: size() samples; out: num_bins() bins.
  void Forward(std::span<const double> in,
               std::span<std::complex<double>> out) const;
  // in: num_bins() bins; out: size() samples, scaled by 1/size().
  void Inverse(std::span<const std::complex<double>> in,
               std::span<double> out) const;

 private:
  int size_;
  void* forward_plan_;
  void* inverse_plan_;
};

}  // namespace hapredict

#endif  // HAPREDICT_FFT_H_
