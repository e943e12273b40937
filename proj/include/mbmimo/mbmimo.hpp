// SPDX-License-Identifier: Apache-2.0
//
// mbmimo - multi-band massive MIMO simulator with mutually coupled antenna arrays
// Copyright (C) 2026 mbmimo project contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MBMIMO_MBMIMO_HPP
#define MBMIMO_MBMIMO_HPP

#include "mbmimo/allocation.hpp"
#include "mbmimo/antenna.hpp"
#include "mbmimo/channel.hpp"
#include "mbmimo/common.hpp"
#include "mbmimo/experiments.hpp"
#include "mbmimo/numerics.hpp"
#include "mbmimo/scenario.hpp"
#include "mbmimo/search.hpp"

#endif
