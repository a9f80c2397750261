#ifndef REDACTCHAIN_MERKLE_HPP
#define REDACTCHAIN_MERKLE_HPP

// Merkle tree over chameleon digests. Leaves are the per-transaction
// chameleon hash values; everything above them is plain SHA-256.
//
// Node encoding rules (canonical):
//   * leaf encoding  = length-prefixed minimal big-endian bytes of h
//   * inner encoding = the 32-byte SHA-256 node digest
//   * parent digest  = SHA-256(left encoding || right encoding)
//   * an odd trailing node at any level is promoted unchanged (no
//     duplicated-last-node rule)
//   * a tree with a single leaf has root SHA-256(leaf encoding)
//   * the empty tree has the all-zero root

#include <vector>

#include "redactchain/chamhash.hpp"
#include "redactchain/encoding.hpp"
#include "redactchain/sha256.hpp"

namespace redactchain {

class MerkleTree {
public:
    explicit MerkleTree(const std::vector<ChameleonDigest>& leaves) {
        if (leaves.empty()) {
            root_.fill(0);
            return;
        }
        struct Node {
            bool is_leaf;
            Bytes encoding; // leaf: length-prefixed bigint; inner: 32-byte digest
        };
        std::vector<Node> level;
        level.reserve(leaves.size());
        for (const auto& leaf : leaves) {
            Bytes enc;
            append_bigint_field(enc, leaf.h);
            level.push_back({true, std::move(enc)});
        }
        while (level.size() > 1) {
            std::vector<Node> next;
            next.reserve(level.size() / 2 + 1);
            std::size_t i = 0;
            for (; i + 1 < level.size(); i += 2) {
                Sha256 h;
                h.update(std::span<const std::uint8_t>(level[i].encoding.data(),
                                                       level[i].encoding.size()));
                h.update(std::span<const std::uint8_t>(level[i + 1].encoding.data(),
                                                       level[i + 1].encoding.size()));
                Digest32 d = h.finalize();
                next.push_back({false, Bytes(d.begin(), d.end())});
            }
            if (i < level.size()) next.push_back(std::move(level[i]));
            level = std::move(next);
        }
        if (level[0].is_leaf) {
            root_ = sha256(level[0].encoding);
        } else {
            std::copy(level[0].encoding.begin(), level[0].encoding.end(), root_.begin());
        }
    }

    const Digest32& root() const { return root_; }

private:
    Digest32 root_{};
};

inline Digest32 merkle_root(const std::vector<ChameleonDigest>& leaves) {
    return MerkleTree(leaves).root();
}

} // namespace redactchain

#endif
