// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pac_lab Authors

#pragma once

#include "pac_lab/comodulogram.hpp"
#include "pac_lab/compare.hpp"
#include "pac_lab/error.hpp"
#include "pac_lab/fft.hpp"
#include "pac_lab/filters.hpp"
#include "pac_lab/io.hpp"
#include "pac_lab/measures.hpp"
#include "pac_lab/signal.hpp"
#include "pac_lab/spectral.hpp"
#include "pac_lab/synthesis.hpp"
#include "pac_lab/version.hpp"
