// Copyright 2026 The stegmesh Authors
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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace stegmesh {

/// Non-floating decimal with 10^-6 resolution. All metric, trust and
/// probability arithmetic goes through this type so that results are
/// bit-identical on every platform.
struct Micro {
    static constexpr std::int64_t kScale = 1'000'000;

    std::int64_t units = 0;

    static constexpr Micro whole(std::int64_t v) { return Micro{v * kScale}; }
    static constexpr Micro from_units(std::int64_t u) { return Micro{u}; }

    /// Parses "12", "0.5", "2.750000". Digits past the sixth decimal round
    /// half up. Returns nullopt on anything else (signs, exponents, junk).
    static std::optional<Micro> parse(std::string_view text);

    std::string to_string() const;

    friend constexpr auto operator<=>(Micro, Micro) = default;
    friend constexpr Micro operator+(Micro a, Micro b) { return Micro{a.units + b.units}; }
    friend constexpr Micro operator-(Micro a, Micro b) { return Micro{a.units - b.units}; }
};

} // namespace stegmesh
