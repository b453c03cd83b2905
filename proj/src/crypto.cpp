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

#include "stegmesh/crypto.hpp"

#include "stegmesh/checksum.hpp"
#include "stegmesh/errors.hpp"

#include <stdexcept>

namespace stegmesh::crypto {

TrustValue::TrustValue(Micro value) : value_(value)
{
    if (value < Micro{} || value > Micro::whole(1))
        throw std::invalid_argument("trust value must lie in [0, 1], got " + value.to_string());
}

TrustValue TrustValue::of(std::string_view decimal)
{
    auto v = Micro::parse(decimal);
    if (!v)
        throw std::invalid_argument("not a decimal: " + std::string(decimal));
    return TrustValue(*v);
}

ClusterKey generate_cluster_key(Rng& rng, std::uint32_t prev_id)
{
    ClusterKey key;
    key.key_id = prev_id + 1;
    rng.fill(key.bytes);
    return key;
}

ClusterState ClusterState::create(ClusterId cluster, NodeId head, Rng& rng, bool rekey_on_eviction)
{
    return ClusterState{cluster, head, {}, generate_cluster_key(rng, 0), rekey_on_eviction};
}

KeyDelivery admit_member(ClusterState& state, NodeId node)
{
    if (!state.members.insert(node).second)
        throw AlreadyMember("node " + to_string(node) + " is already a member of cluster " +
                            std::to_string(state.cluster.value));
    return KeyDelivery{node, state.cluster, state.key};
}

std::vector<KeyDelivery> evict_member(ClusterState& state, NodeId node, Rng& rng)
{
    if (state.members.erase(node) == 0)
        throw NotMember("node " + to_string(node) + " is not a member of cluster " +
                        std::to_string(state.cluster.value));
    std::vector<KeyDelivery> out;
    if (!state.rekey_on_eviction)
        return out;
    state.key = generate_cluster_key(rng, state.key.key_id);
    for (auto member : state.members)
        out.push_back(KeyDelivery{member, state.cluster, state.key});
    return out;
}

namespace {

std::uint32_t tag_of(ByteView nonce_bytes, ByteView plaintext)
{
    return crc32(crc32(nonce_bytes), plaintext);
}

} // namespace

Bytes seal_intra(ByteView payload, const ClusterKey& key, Nonce nonce)
{
    Bytes out;
    out.reserve(kNonceSize + payload.size() + kTagSize);
    ByteWriter w(out);
    w.u64(nonce);
    const ByteView nonce_bytes(out.data(), kNonceSize);
    const std::uint32_t tag = tag_of(nonce_bytes, payload);
    w.raw(payload);
    apply_keystream(key.bytes, nonce, std::span(out).subspan(kNonceSize));
    w.u32(tag);
    return out;
}

std::optional<Bytes> try_open_intra(ByteView ct, const ClusterKey& key)
{
    if (ct.size() < kNonceSize + kTagSize)
        return std::nullopt;
    Nonce nonce = 0;
    for (std::size_t i = 0; i < kNonceSize; ++i)
        nonce = nonce << 8 | ct[i];
    Bytes plain(ct.begin() + kNonceSize, ct.end() - kTagSize);
    apply_keystream(key.bytes, nonce, plain);
    std::uint32_t stored = 0;
    for (std::size_t i = ct.size() - kTagSize; i < ct.size(); ++i)
        stored = stored << 8 | ct[i];
    if (tag_of(ct.first(kNonceSize), plain) != stored)
        return std::nullopt;
    return plain;
}

Bytes open_intra(ByteView ct, const ClusterKey& key)
{
    auto plain = try_open_intra(ct, key);
    if (!plain)
        throw IntegrityFailure("intra-cluster ciphertext failed integrity check");
    return std::move(*plain);
}

std::set<NodeId> elect_gateways(const std::vector<std::pair<NodeId, TrustValue>>& border_nodes,
                                TrustValue threshold)
{
    std::set<NodeId> out;
    for (const auto& [node, trust] : border_nodes)
        if (trust >= threshold)
            out.insert(node);
    return out;
}

} // namespace stegmesh::crypto
