// Copyright 2026 The ponas-pool Authors
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

namespace ponas {

/// Base class of every error raised by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define PONAS_DEFINE_ERROR(name)        \
  class name : public Error {           \
  public:                               \
    using Error::Error;                 \
  }

// space
PONAS_DEFINE_ERROR(EmptyRange);
PONAS_DEFINE_ERROR(RangeTooLarge);
PONAS_DEFINE_ERROR(ArityMismatch);
PONAS_DEFINE_ERROR(InvalidSpace);

// oracle
PONAS_DEFINE_ERROR(SpaceTooLarge);

// pool
PONAS_DEFINE_ERROR(NoStrongMiners);
PONAS_DEFINE_ERROR(UnknownMiner);
PONAS_DEFINE_ERROR(TooFewMiners);
PONAS_DEFINE_ERROR(NoBackupAvailable);
PONAS_DEFINE_ERROR(NoContribution);

// chain
PONAS_DEFINE_ERROR(EmptyTaskList);
PONAS_DEFINE_ERROR(InvalidTransition);

// sim / config
PONAS_DEFINE_ERROR(InvalidScenario);
PONAS_DEFINE_ERROR(ConfigError);

#undef PONAS_DEFINE_ERROR

} // namespace ponas
