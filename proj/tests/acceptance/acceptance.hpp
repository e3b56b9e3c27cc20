// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace acceptance {

struct Criterion {
    int number;
    std::string title;
    std::function<bool(std::ostream&)> run;
};

const std::vector<Criterion>& criteria();

/// Fails the criterion with a message unless the condition holds.
#define REQUIRE_OR_FAIL(cond, msg)                                   \
    do {                                                             \
        if (!(cond)) {                                               \
            out << "      FAILED: " << msg << " (" << #cond << ")\n"; \
            return false;                                            \
        }                                                            \
    } while (0)

}  // namespace acceptance
