//
// Copyright 2026 The LSP Lab Authors
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
//

#include "lsp/finite_diff.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "lsp/error.h"

namespace lsp {
namespace {

struct Evaluation {
  double value;
  std::vector<bool> kinks;
};

Evaluation Evaluate(const ScalarFn& f, const Tensor& x, std::size_t coord,
                    const char* where) {
  Tape tape;
  const Var y = f(tape.Variable(x));
  const double v = y.value().item();
  if (!std::isfinite(v)) {
    throw NumericalError("finite_diff_check: non-finite f(" +
                         std::string(where) + ") at coordinate " +
                         std::to_string(coord));
  }
  return {v, tape.kink_signs()};
}

}  // namespace

FiniteDiffResult FiniteDiffCheck(const ScalarFn& f, const Tensor& x,
                                 double h) {
  if (!(h > 0.0)) throw ConfigError("finite_diff_check: h must be > 0");

  Tape tape;
  const Var xv = tape.Variable(x);
  const Var y = f(xv);
  const double y0 = y.value().item();
  if (!std::isfinite(y0)) {
    throw NumericalError("finite_diff_check: non-finite f(x)");
  }
  tape.Backward(y);
  const Tensor analytic =
      xv.grad().empty() ? Tensor(x.shape(), 0.0) : xv.grad();
  const std::vector<bool> base_kinks = tape.kink_signs();

  FiniteDiffResult result;
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const Evaluation plus = Evaluate(f, probe, i, "x+h");
    probe[i] = x[i] - h;
    const Evaluation minus = Evaluate(f, probe, i, "x-h");
    probe[i] = x[i];
    if (plus.kinks != base_kinks || minus.kinks != base_kinks) {
      result.kink_excluded.push_back(i);
      continue;
    }
    const double central = (plus.value - minus.value) / (2.0 * h);
    const double err =
        std::abs(analytic[i] - central) / std::max(1.0, std::abs(central));
    ++result.checked;
    if (result.checked == 1 || err > result.max_relative_error) {
      result.max_relative_error = err;
      result.worst_coordinate = i;
    }
  }
  return result;
}

}  // namespace lsp
