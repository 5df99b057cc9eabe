/*
* Copyright (C) 2026 henonlab authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#pragma once

/// \file
/// Everything at once: maps, Green functions, filtration constants, leaf tracing,
/// Fubini-Study bounds and the exact series certifier.

#include "henon/errors.hpp"
#include "henon/mp.hpp"
#include "henon/ext_complex.hpp"
#include "henon/map.hpp"
#include "henon/green.hpp"
#include "henon/render.hpp"
#include "henon/io.hpp"
#include "henon/filtration.hpp"
#include "henon/normal_form.hpp"
#include "henon/metric.hpp"
#include "henon/series.hpp"
