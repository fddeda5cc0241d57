// Copyright 2026 The ancm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace ancm {

/// Base of every error raised by the library. Failures that drive learning
/// (comprehension failures) are values, not exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ANCM_DEFINE_ERROR(Name)          \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  };

ANCM_DEFINE_ERROR(ParseError)
ANCM_DEFINE_ERROR(MalformedTrace)
ANCM_DEFINE_ERROR(UnknownContext)
ANCM_DEFINE_ERROR(DuplicateConcept)
ANCM_DEFINE_ERROR(NoProjection)
ANCM_DEFINE_ERROR(Indeterminate)
ANCM_DEFINE_ERROR(Unsatisfiable)
ANCM_DEFINE_ERROR(PreconditionViolated)
ANCM_DEFINE_ERROR(UnparseableUtterance)
ANCM_DEFINE_ERROR(SignalMismatch)
ANCM_DEFINE_ERROR(PlanningFailure)
ANCM_DEFINE_ERROR(ConfigError)

#undef ANCM_DEFINE_ERROR

}  // namespace ancm
