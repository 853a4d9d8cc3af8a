// Copyright 2026 The plexus-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include "doctest.h"
#include "plexus/error.hpp"

#ifndef PLEXUS_DATA_DIR
#define PLEXUS_DATA_DIR "data"
#endif

namespace testutil {

inline std::string data_path(const std::string& name) { return std::string(PLEXUS_DATA_DIR) + "/" + name; }

// Runs f and returns the code of the plexus::Error it throws.
template <typename F>
plexus::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const plexus::Error& e) {
    return e.code();
  }
  FAIL("expected a plexus::Error");
  return plexus::ErrorCode::kIoFailure;
}

}  // namespace testutil
