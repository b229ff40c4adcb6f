// Copyright 2026 The mwfisher Authors
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

#pragma once

#include "mwfisher/channels.hpp"
#include "mwfisher/convex_roof.hpp"
#include "mwfisher/errors.hpp"
#include "mwfisher/estimator.hpp"
#include "mwfisher/measures.hpp"
#include "mwfisher/qfi.hpp"
#include "mwfisher/random.hpp"
#include "mwfisher/state.hpp"
#include "mwfisher/state_io.hpp"
