// Copyright 2026 the scenerec authors
// SPDX-License-Identifier: Apache-2.0
#include "scenerec/textcodec.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "scenerec/common.hpp"
#include "scenerec/digest.hpp"

namespace scenerec {

namespace {

const char* kPoiSlotNames[] = {"name", "location", "tag", "intro", "menu", "stats", "service"};
const char* kUserSlotNames[] = {"profile", "actions"};

std::string slot_token_name(int k, int n_k, bool eos) {
  std::ostringstream ss;
  if (k <= n_k) {
    ss << (eos ? "</poi_" : "<poi_") << kPoiSlotNames[k] << ">";
  } else {
    ss << (eos ? "</user_" : "<user_") << kUserSlotNames[k - n_k - 1] << ">";
  }
  return ss.str();
}

std::string scene_token_name(int k, bool eos) {
  std::ostringstream ss;
  ss << (eos ? "</scene_" : "<scene_") << k << ">";
  return ss.str();
}

}  // namespace

std::pair<int, int> SpecialTokenRegistry::pair_for_slot(int k) const {
  require(k >= 0 && k <= n_k + n_q, "special-token slot out of range: " + std::to_string(k));
  if (k <= n_k) return poi_pairs.at(static_cast<size_t>(k));
  return user_pairs.at(static_cast<size_t>(k - n_k - 1));
}

std::pair<int, int> SpecialTokenRegistry::pair_for_scene(int k) const {
  require(k >= 0 && k < n_scene, "scene-feature index out of range: " + std::to_string(k));
  return scene_pairs.at(static_cast<size_t>(k));
}

Vocab Vocab::build(const std::vector<std::string>& corpus, int max_size) {
  require(!corpus.empty(), "vocab build requires a non-empty corpus");
  Vocab v;
  std::set<char> chars;
  for (const auto& line : corpus)
    for (char c : line) chars.insert(c);

  v.id_to_token_.push_back("<pad>");
  v.roles_.push_back("pad");
  v.id_to_token_.push_back("<unk>");
  v.roles_.push_back("unk");
  for (char c : chars) {
    if (static_cast<int>(v.id_to_token_.size()) >= max_size) break;
    v.char_to_id_[c] = static_cast<int>(v.id_to_token_.size());
    v.id_to_token_.push_back(std::string(1, c));
    v.roles_.push_back("char");
  }
  v.base_size_ = static_cast<int>(v.id_to_token_.size());

  SpecialTokenRegistry& reg = v.registry_;
  auto add_special = [&](const std::string& name, const std::string& role) {
    int id = static_cast<int>(v.id_to_token_.size());
    v.id_to_token_.push_back(name);
    v.roles_.push_back(role);
    return id;
  };
  for (int k = 0; k <= reg.n_k; ++k) {
    int bos = add_special(slot_token_name(k, reg.n_k, false), "poi_bos:" + std::to_string(k));
    int eos = add_special(slot_token_name(k, reg.n_k, true), "poi_eos:" + std::to_string(k));
    reg.poi_pairs.emplace_back(bos, eos);
  }
  for (int q = 0; q < reg.n_q; ++q) {
    int k = reg.n_k + 1 + q;
    int bos = add_special(slot_token_name(k, reg.n_k, false), "user_bos:" + std::to_string(k));
    int eos = add_special(slot_token_name(k, reg.n_k, true), "user_eos:" + std::to_string(k));
    reg.user_pairs.emplace_back(bos, eos);
  }
  for (int k = 0; k < reg.n_scene; ++k) {
    int bos = add_special(scene_token_name(k, false), "scene_bos:" + std::to_string(k));
    int eos = add_special(scene_token_name(k, true), "scene_eos:" + std::to_string(k));
    reg.scene_pairs.emplace_back(bos, eos);
  }
  reg.agg_token = add_special("<agg>", "agg");
  return v;
}

std::vector<int> Vocab::encode(const std::string& text) const {
  std::vector<int> out;
  out.reserve(text.size());
  for (char c : text) {
    auto it = char_to_id_.find(c);
    out.push_back(it == char_to_id_.end() ? kUnkId : it->second);
  }
  return out;
}

std::string Vocab::decode(const std::vector<int>& ids) const {
  std::string out;
  for (int id : ids) {
    require(id >= 0 && id < size(), "decode: id out of range");
    if (id == kPadId) continue;
    if (id == kUnkId) {
      out += "\xef\xbf\xbd";  // U+FFFD
      continue;
    }
    out += id_to_token_[static_cast<size_t>(id)];
  }
  return out;
}

std::string Vocab::serialize() const {
  std::ostringstream ss;
  ss << "scenerec-vocab v1\n";
  ss << "base_size " << base_size_ << " n_k " << registry_.n_k << " n_q " << registry_.n_q
     << " n_scene " << registry_.n_scene << "\n";
  for (int id = 0; id < size(); ++id) {
    const std::string& tok = id_to_token_[static_cast<size_t>(id)];
    ss << id << "\t" << roles_[static_cast<size_t>(id)] << "\t";
    if (roles_[static_cast<size_t>(id)] == "char") {
      // Hex-escape so whitespace characters survive the text manifest.
      char c = tok[0];
      static const char* digits = "0123456789abcdef";
      ss << "x" << digits[(static_cast<unsigned char>(c) >> 4) & 0xf]
         << digits[static_cast<unsigned char>(c) & 0xf];
    } else {
      ss << tok;
    }
    ss << "\n";
  }
  return ss.str();
}

Vocab Vocab::deserialize(const std::string& manifest) {
  std::istringstream in(manifest);
  std::string header;
  std::getline(in, header);
  require(header == "scenerec-vocab v1", "vocab manifest: unsupported version header");
  Vocab v;
  std::string word;
  int base_size = 0;
  in >> word >> base_size >> word >> v.registry_.n_k >> word >> v.registry_.n_q >> word >>
      v.registry_.n_scene;
  std::string rest;
  std::getline(in, rest);

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    size_t t1 = line.find('\t');
    size_t t2 = line.find('\t', t1 + 1);
    require(t1 != std::string::npos && t2 != std::string::npos, "vocab manifest: malformed line");
    int id = std::stoi(line.substr(0, t1));
    std::string role = line.substr(t1 + 1, t2 - t1 - 1);
    std::string tok = line.substr(t2 + 1);
    require(id == static_cast<int>(v.id_to_token_.size()), "vocab manifest: ids out of order");
    if (role == "char") {
      require(tok.size() == 3 && tok[0] == 'x', "vocab manifest: bad char escape");
      int hi = std::stoi(tok.substr(1, 1), nullptr, 16);
      int lo = std::stoi(tok.substr(2, 1), nullptr, 16);
      char c = static_cast<char>((hi << 4) | lo);
      v.char_to_id_[c] = id;
      v.id_to_token_.push_back(std::string(1, c));
    } else {
      v.id_to_token_.push_back(tok);
    }
    v.roles_.push_back(role);
  }
  v.base_size_ = base_size;

  // Rebuild registry pairs from roles.
  SpecialTokenRegistry& reg = v.registry_;
  reg.poi_pairs.assign(static_cast<size_t>(reg.n_k + 1), {-1, -1});
  reg.user_pairs.assign(static_cast<size_t>(reg.n_q), {-1, -1});
  reg.scene_pairs.assign(static_cast<size_t>(reg.n_scene), {-1, -1});
  for (int id = 0; id < v.size(); ++id) {
    const std::string& role = v.roles_[static_cast<size_t>(id)];
    size_t colon = role.find(':');
    if (colon == std::string::npos) {
      if (role == "agg") reg.agg_token = id;
      continue;
    }
    std::string kind = role.substr(0, colon);
    int k = std::stoi(role.substr(colon + 1));
    if (kind == "poi_bos") reg.poi_pairs[static_cast<size_t>(k)].first = id;
    if (kind == "poi_eos") reg.poi_pairs[static_cast<size_t>(k)].second = id;
    if (kind == "user_bos") reg.user_pairs[static_cast<size_t>(k - reg.n_k - 1)].first = id;
    if (kind == "user_eos") reg.user_pairs[static_cast<size_t>(k - reg.n_k - 1)].second = id;
    if (kind == "scene_bos") reg.scene_pairs[static_cast<size_t>(k)].first = id;
    if (kind == "scene_eos") reg.scene_pairs[static_cast<size_t>(k)].second = id;
  }
  return v;
}

uint64_t Vocab::digest() const { return fnv1a64(serialize()); }

std::vector<int> wrap_keywords(const Vocab& vocab, const KeywordedText& text, int first_slot,
                               int last_slot) {
  require(last_slot >= first_slot, "wrap_keywords: empty slot range");
  require(static_cast<int>(text.size()) == last_slot - first_slot + 1,
          "wrap_keywords: slice count does not match slot range");
  std::vector<int> out;
  for (int k = first_slot; k <= last_slot; ++k) {
    auto [bos, eos] = vocab.registry().pair_for_slot(k);
    out.push_back(bos);
    auto body = vocab.encode(text.text(static_cast<size_t>(k - first_slot)));
    out.insert(out.end(), body.begin(), body.end());
    out.push_back(eos);
  }
  return out;
}

KeywordedText unwrap_keywords(const Vocab& vocab, const std::vector<int>& tokens) {
  const SpecialTokenRegistry& reg = vocab.registry();
  // Reverse index: bos id -> slot, eos id -> slot.
  std::map<int, int> bos_slot, eos_slot;
  for (int k = 0; k <= reg.n_k + reg.n_q; ++k) {
    auto [b, e] = reg.pair_for_slot(k);
    bos_slot[b] = k;
    eos_slot[e] = k;
  }
  KeywordedText out;
  size_t i = 0;
  while (i < tokens.size()) {
    auto it = bos_slot.find(tokens[i]);
    require(it != bos_slot.end(), "unwrap: expected a begin marker");
    int slot = it->second;
    ++i;
    std::vector<int> body;
    while (i < tokens.size() && !eos_slot.count(tokens[i])) {
      require(!bos_slot.count(tokens[i]) && !vocab.is_special(tokens[i]),
              "unwrap: unexpected marker inside slice body");
      body.push_back(tokens[i]);
      ++i;
    }
    require(i < tokens.size() && eos_slot.at(tokens[i]) == slot,
            "unwrap: begin/end marker mismatch");
    ++i;
    std::string name = slot <= reg.n_k ? kPoiSlotNames[slot] : kUserSlotNames[slot - reg.n_k - 1];
    out.slices.push_back({name, vocab.decode(body)});
  }
  return out;
}

PretrainExample build_pretrain_example(const Vocab& vocab, const KeywordedText& description) {
  const SpecialTokenRegistry& reg = vocab.registry();
  require(reg.n_k >= 3, "pretrain example needs at least 3 POI slots");
  require(static_cast<int>(description.size()) == reg.n_k + 1,
          "pretrain example: description slice count must be n_k + 1");
  KeywordedText head, tail;
  head.slices.assign(description.slices.begin(), description.slices.begin() + 2);
  tail.slices.assign(description.slices.begin() + 2, description.slices.end());
  PretrainExample ex;
  ex.x = wrap_keywords(vocab, head, 0, 1);
  ex.y = wrap_keywords(vocab, tail, 2, reg.n_k);
  return ex;
}

}  // namespace scenerec
