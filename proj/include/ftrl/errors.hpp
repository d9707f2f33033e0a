// Copyright 2026 The ftrl-dynamics Authors
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

#ifndef FTRL_ERRORS_HPP_
#define FTRL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ftrl {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define FTRL_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                    \
   public:                                                       \
    explicit Name(const std::string& msg) : Error(msg) {}        \
  }

FTRL_DEFINE_ERROR(DimensionMismatchError);
FTRL_DEFINE_ERROR(InvalidArgumentError);
FTRL_DEFINE_ERROR(SizeBoundError);
FTRL_DEFINE_ERROR(BoundaryGradientError);
FTRL_DEFINE_ERROR(SingularHessianError);
FTRL_DEFINE_ERROR(NoConvergenceError);
FTRL_DEFINE_ERROR(StepFailureError);
FTRL_DEFINE_ERROR(NonGenericGameError);
FTRL_DEFINE_ERROR(SteepRegularizerError);
FTRL_DEFINE_ERROR(NonPositiveGapError);
FTRL_DEFINE_ERROR(NotZeroSumError);
FTRL_DEFINE_ERROR(NonInteriorEquilibriumError);
FTRL_DEFINE_ERROR(ParseError);
FTRL_DEFINE_ERROR(UnknownBuiltinError);

#undef FTRL_DEFINE_ERROR

}  // namespace ftrl

#endif  // FTRL_ERRORS_HPP_
