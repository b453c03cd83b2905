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

#include "stegmesh/records.hpp"

namespace stegmesh::records {

namespace {

template <typename T>
std::optional<T> finish(ByteReader& r, T value)
{
    if (!r.done())
        return std::nullopt;
    return value;
}

} // namespace

Bytes Beacon::encode() const
{
    ByteWriter w;
    w.u64(address.value).u64(profile.mask());
    return w.take();
}

std::optional<Beacon> Beacon::decode(ByteView in)
{
    ByteReader r(in);
    auto a = r.u64();
    auto p = r.u64();
    if (!a || !p)
        return std::nullopt;
    return finish(r, Beacon{NodeId{*a}, CapabilityProfile(*p)});
}

Bytes Hello::encode() const
{
    ByteWriter w;
    w.u64(sender.value).u8(flags).u32(digest).u64(profile.mask());
    return w.take();
}

std::optional<Hello> Hello::decode(ByteView in)
{
    ByteReader r(in);
    auto s = r.u64();
    auto f = r.u8();
    auto d = r.u32();
    auto p = r.u64();
    if (!s || !f || !d || !p)
        return std::nullopt;
    return finish(r, Hello{NodeId{*s}, *f, *d, CapabilityProfile(*p)});
}

Bytes RoutingUpdate::encode() const
{
    ByteWriter w;
    w.u64(sender.value).u16(static_cast<std::uint16_t>(entries.size()));
    for (const auto& e : entries) {
        const auto cost = static_cast<std::uint32_t>(std::min<std::int64_t>(e.metric.cost.units, UINT32_MAX));
        w.u64(e.destination.value)
            .u32(cost)
            .u8(static_cast<std::uint8_t>(std::min<std::uint32_t>(e.metric.hop_count, 255)))
            .u64(e.methods.mask());
    }
    return w.take();
}

std::optional<RoutingUpdate> RoutingUpdate::decode(ByteView in)
{
    ByteReader r(in);
    auto s = r.u64();
    auto n = r.u16();
    if (!s || !n)
        return std::nullopt;
    RoutingUpdate out{NodeId{*s}, {}};
    out.entries.reserve(*n);
    for (std::uint16_t i = 0; i < *n; ++i) {
        auto dest = r.u64();
        auto cost = r.u32();
        auto hops = r.u8();
        auto methods = r.u64();
        if (!dest || !cost || !hops || !methods)
            return std::nullopt;
        routing::RouteEntry e;
        e.destination = NodeId{*dest};
        e.next_hop = out.sender;
        e.metric = Metric{Micro::from_units(*cost), *hops};
        e.methods = CapabilityProfile(*methods);
        out.entries.push_back(e);
    }
    return finish(r, std::move(out));
}

Bytes CreateStegLink::encode() const
{
    ByteWriter w;
    w.u64(sender.value).u64(new_ch.value).u64(new_profile.mask()).u8(depth);
    w.u8(static_cast<std::uint8_t>(visited.size()));
    for (auto v : visited)
        w.u64(v.value);
    return w.take();
}

std::optional<CreateStegLink> CreateStegLink::decode(ByteView in)
{
    ByteReader r(in);
    auto s = r.u64();
    auto n = r.u64();
    auto p = r.u64();
    auto d = r.u8();
    auto count = r.u8();
    if (!s || !n || !p || !d || !count)
        return std::nullopt;
    CreateStegLink out{NodeId{*s}, NodeId{*n}, CapabilityProfile(*p), *d, {}};
    for (std::uint8_t i = 0; i < *count; ++i) {
        auto v = r.u64();
        if (!v)
            return std::nullopt;
        out.visited.push_back(NodeId{*v});
    }
    return finish(r, std::move(out));
}

Bytes Data::encode() const
{
    ByteWriter w;
    w.u64(sender.value).u64(origin.value).u64(destination.value).u8(ttl);
    w.u32(static_cast<std::uint32_t>(payload.size())).raw(payload);
    return w.take();
}

std::optional<Data> Data::decode(ByteView in)
{
    ByteReader r(in);
    auto s = r.u64();
    auto o = r.u64();
    auto d = r.u64();
    auto ttl = r.u8();
    auto len = r.u32();
    if (!s || !o || !d || !ttl || !len)
        return std::nullopt;
    auto body = r.raw(*len);
    if (!body)
        return std::nullopt;
    return finish(r, Data{NodeId{*s}, NodeId{*o}, NodeId{*d}, *ttl, std::move(*body)});
}

Bytes KeyDelivery::encode() const
{
    ByteWriter w;
    w.u64(cluster.value).u32(key.key_id).raw(key.bytes);
    return w.take();
}

std::optional<KeyDelivery> KeyDelivery::decode(ByteView in)
{
    ByteReader r(in);
    auto c = r.u64();
    auto id = r.u32();
    auto bytes = r.raw(32);
    if (!c || !id || !bytes)
        return std::nullopt;
    KeyDelivery out{ClusterId{*c}, {}};
    out.key.key_id = *id;
    std::copy(bytes->begin(), bytes->end(), out.key.bytes.begin());
    return finish(r, std::move(out));
}

Bytes IntraCluster::encode() const
{
    ByteWriter w;
    w.u64(cluster.value).u32(key_id).raw(ciphertext);
    return w.take();
}

std::optional<IntraCluster> IntraCluster::decode(ByteView in)
{
    ByteReader r(in);
    auto c = r.u64();
    auto id = r.u32();
    if (!c || !id)
        return std::nullopt;
    auto ct = r.raw(r.remaining());
    return IntraCluster{ClusterId{*c}, *id, std::move(*ct)};
}

} // namespace stegmesh::records
