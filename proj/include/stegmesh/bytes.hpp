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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stegmesh {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Appends big-endian integers and raw bytes to a buffer.
class ByteWriter {
public:
    ByteWriter() = default;
    explicit ByteWriter(Bytes& out) : out_(&out) {}

    ByteWriter& u8(std::uint8_t v) { buf().push_back(v); return *this; }
    ByteWriter& u16(std::uint16_t v) { return be(v, 2); }
    ByteWriter& u32(std::uint32_t v) { return be(v, 4); }
    ByteWriter& u64(std::uint64_t v) { return be(v, 8); }
    ByteWriter& raw(ByteView v) { buf().insert(buf().end(), v.begin(), v.end()); return *this; }

    Bytes take() { return std::move(own_); }

private:
    ByteWriter& be(std::uint64_t v, int width)
    {
        for (int i = width - 1; i >= 0; --i)
            buf().push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        return *this;
    }
    Bytes& buf() { return out_ ? *out_ : own_; }

    Bytes* out_ = nullptr;
    Bytes own_;
};

/// Bounds-checked big-endian reader. Every accessor returns nullopt once the
/// input is exhausted; callers treat that as a malformed record.
class ByteReader {
public:
    explicit ByteReader(ByteView in) : in_(in) {}

    std::optional<std::uint8_t> u8() { return be<std::uint8_t>(1); }
    std::optional<std::uint16_t> u16() { return be<std::uint16_t>(2); }
    std::optional<std::uint32_t> u32() { return be<std::uint32_t>(4); }
    std::optional<std::uint64_t> u64() { return be<std::uint64_t>(8); }

    std::optional<Bytes> raw(std::size_t n)
    {
        if (remaining() < n)
            return std::nullopt;
        Bytes out(in_.begin() + pos_, in_.begin() + pos_ + n);
        pos_ += n;
        return out;
    }

    std::size_t remaining() const { return in_.size() - pos_; }
    bool done() const { return remaining() == 0; }

private:
    template <typename T>
    std::optional<T> be(std::size_t width)
    {
        if (remaining() < width)
            return std::nullopt;
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < width; ++i)
            v = (v << 8) | in_[pos_ + i];
        pos_ += width;
        return static_cast<T>(v);
    }

    ByteView in_;
    std::size_t pos_ = 0;
};

std::string to_hex(ByteView bytes);
std::optional<Bytes> from_hex(std::string_view hex);

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

} // namespace stegmesh
