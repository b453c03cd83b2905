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

#include "stegmesh/bytes.hpp"

#include <cstdint>
#include <string>

namespace stegmesh {

/// CRC-32/ISO-HDLC: reflected polynomial 0x04C11DB7, init and final xor
/// 0xFFFFFFFF. `crc32("123456789") == 0xCBF43926`.
std::uint32_t crc32(ByteView data);
std::uint32_t crc32(std::uint32_t running, ByteView data);

/// 64-bit FNV-1a, used for digests of canonical documents.
std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

} // namespace stegmesh
