// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pac_lab Authors

#pragma once

namespace pac_lab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pac_lab
