// Copyright 2026 the scenerec authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace scenerec {

// An entity description cut into named keyword slices. Slice order is
// significant: slice 0 is the entity name, slice 1 its location, later
// slices carry details.
struct KeywordedText {
  struct Slice {
    std::string name;
    std::string text;
  };
  std::vector<Slice> slices;

  size_t size() const { return slices.size(); }
  const std::string& text(size_t i) const { return slices.at(i).text; }
};

// Paired begin/end marker ids for each keyword slot, plus scene-feature
// pairs and the aggregation token. Slot indices: POI slots [0, n_k],
// user slots [n_k+1, n_k+n_q]. Scene features carry their own pairs so
// that a cached scene text is identifiable by its end marker position.
struct SpecialTokenRegistry {
  int n_k = 6;  // max POI slot index; POI slices are 0..n_k inclusive
  int n_q = 2;  // user slot count; user slices are n_k+1..n_k+n_q
  int n_scene = 10;

  std::vector<std::pair<int, int>> poi_pairs;    // n_k + 1 entries
  std::vector<std::pair<int, int>> user_pairs;   // n_q entries
  std::vector<std::pair<int, int>> scene_pairs;  // n_scene entries
  int agg_token = -1;

  int core_pair_count() const { return n_k + 1 + n_q; }

  // Slot index k in [0, n_k + n_q]; POI entries first, then user entries.
  std::pair<int, int> pair_for_slot(int k) const;
  std::pair<int, int> pair_for_scene(int k) const;
};

// Character-level vocabulary plus reserved and special ids. Ids 0 and 1 are
// pad and unknown; base characters follow in byte order; special tokens are
// appended after the base vocabulary so they can never be produced by
// encoding plain text.
class Vocab {
 public:
  static constexpr int kPadId = 0;
  static constexpr int kUnkId = 1;

  // Builds the base character vocabulary from a corpus and reserves the
  // registry's special ids. max_size caps the number of base characters.
  static Vocab build(const std::vector<std::string>& corpus, int max_size = 4096);

  int size() const { return static_cast<int>(id_to_token_.size()); }
  int base_size() const { return base_size_; }

  const SpecialTokenRegistry& registry() const { return registry_; }

  bool is_special(int id) const { return id >= base_size_; }

  // Encodes plain text; unseen characters map to the unknown id.
  std::vector<int> encode(const std::string& text) const;
  // Decodes any id sequence; pad renders as nothing, unknown as U+FFFD,
  // special ids as their angle-bracket names.
  std::string decode(const std::vector<int>& ids) const;

  const std::string& token_name(int id) const { return id_to_token_.at(static_cast<size_t>(id)); }

  // Versioned text manifest (one token per line: id, role, token) for exact
  // reload of vocab + registry.
  std::string serialize() const;
  static Vocab deserialize(const std::string& manifest);

  uint64_t digest() const;

 private:
  std::map<char, int> char_to_id_;
  std::vector<std::string> id_to_token_;  // display names; chars as themselves
  std::vector<std::string> roles_;
  int base_size_ = 0;
  SpecialTokenRegistry registry_;
};

// Token sequence wrapping: bos_k ++ encode(slice_k) ++ eos_k for each k in
// [first_slot, last_slot], in order. Slice count must match the slot range.
std::vector<int> wrap_keywords(const Vocab& vocab, const KeywordedText& text, int first_slot,
                               int last_slot);

// Inverse of wrap_keywords on well-formed sequences; throws on malformed
// marker structure. Returned slices are named by their marker slot.
KeywordedText unwrap_keywords(const Vocab& vocab, const std::vector<int>& tokens);

// Prompt/target split of a wrapped description: x covers slices 0..1
// (name, location), y covers slices 2..n_k.
struct PretrainExample {
  std::vector<int> x;
  std::vector<int> y;
};

PretrainExample build_pretrain_example(const Vocab& vocab, const KeywordedText& description);

}  // namespace scenerec
