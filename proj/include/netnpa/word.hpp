#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "netnpa/network.hpp"

namespace netnpa {

using LetterId = std::uint16_t;

// A word is a canonical letter sequence. The zero word only arises when
// outcome orthogonality is in force (drop_last encodings).
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<LetterId> letters, std::uint64_t tag = 0)
      : letters_(std::move(letters)), tag_(tag) {}

  static Word zero(std::uint64_t tag = 0) {
    Word w;
    w.zero_ = true;
    w.tag_ = tag;
    return w;
  }

  bool is_zero() const { return zero_; }
  bool empty() const { return !zero_ && letters_.empty(); }
  std::size_t size() const { return letters_.size(); }
  LetterId operator[](std::size_t i) const { return letters_[i]; }
  const std::vector<LetterId>& letters() const { return letters_; }
  std::uint64_t alphabet_tag() const { return tag_; }

  friend bool operator==(const Word& a, const Word& b) {
    return a.zero_ == b.zero_ && a.letters_ == b.letters_;
  }
  // length first, then lexicographic on letter ids
  friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
    if (a.zero_ != b.zero_) return a.zero_ ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.letters_.size() != b.letters_.size()) return a.letters_.size() <=> b.letters_.size();
    return std::lexicographical_compare_three_way(a.letters_.begin(), a.letters_.end(),
                                                  b.letters_.begin(), b.letters_.end());
  }

 private:
  std::vector<LetterId> letters_;
  std::uint64_t tag_ = 0;
  bool zero_ = false;
};

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept {
    std::uint64_t h = w.is_zero() ? 0x9e3779b97f4a7c15ULL : 1469598103934665603ULL;
    for (LetterId l : w.letters()) {
      h ^= l;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

enum class OutcomeEncoding {
  full,       // one letter per outcome, completeness handled at the moment layer
  drop_last,  // last outcome omitted, distinct outcomes multiply to zero
};

struct Letter {
  enum class Kind : std::uint8_t { measurement, scalar };
  Kind kind = Kind::measurement;
  int party = 0;
  int input = 0;
  int output = 0;
  std::vector<int> copies;  // one copy index per leg when inflated
  Word payload;             // the A-word a scalar letter stands for
  bool last_outcome = false;

  bool is_scalar() const { return kind == Kind::scalar; }
};

struct AlphabetConfig {
  Scenario scenario;
  OutcomeEncoding encoding = OutcomeEncoding::full;
  int inflation_order = 0;  // 0 = not inflated
  int scalar_length = 0;    // kappa letters for A-words up to this length, 0 = none
};

class Alphabet {
 public:
  explicit Alphabet(AlphabetConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.scenario.validate();
    net_ = network_of(cfg_.scenario.topology);
    if (cfg_.inflation_order < 0 || cfg_.scalar_length < 0) {
      throw std::invalid_argument("negative alphabet parameter");
    }
    if (cfg_.inflation_order > 0 && cfg_.scalar_length > 0) {
      throw std::invalid_argument("scalar extension of an inflated alphabet is not supported");
    }
    std::vector<Letter> meas = measurement_letters();
    std::vector<Word> payloads;
    if (cfg_.scalar_length > 0) {
      AlphabetConfig base = cfg_;
      base.scalar_length = 0;
      Alphabet a(base);
      for (const Word& w : a.enumerate(cfg_.scalar_length)) {
        if (!w.empty() && a.is_party_word(w, 0)) payloads.push_back(w);
      }
    }
    const auto shift = static_cast<LetterId>(payloads.size());
    for (const Word& w : payloads) {
      Letter l;
      l.kind = Letter::Kind::scalar;
      std::vector<LetterId> ls;
      for (LetterId id : w.letters()) ls.push_back(static_cast<LetterId>(id + shift));
      l.payload = Word(std::move(ls));
      letters_.push_back(std::move(l));
    }
    for (Letter& l : meas) letters_.push_back(std::move(l));
    if (letters_.size() >= std::numeric_limits<LetterId>::max()) {
      throw std::invalid_argument("alphabet too large");
    }
    tag_ = fingerprint();
    for (auto& l : letters_) {
      if (l.is_scalar()) l.payload = Word(l.payload.letters(), tag_);
    }
    build_tables();
  }

  const AlphabetConfig& config() const { return cfg_; }
  const Scenario& scenario() const { return cfg_.scenario; }
  const Network& network() const { return net_; }
  bool inflated() const { return cfg_.inflation_order > 0; }
  bool projective() const { return cfg_.encoding == OutcomeEncoding::drop_last; }
  std::uint64_t tag() const { return tag_; }
  std::size_t size() const { return letters_.size(); }
  const Letter& letter(LetterId id) const { return letters_.at(id); }
  bool is_scalar(LetterId id) const { return letters_[id].is_scalar(); }

  bool commute(LetterId a, LetterId b) const { return comm_[a * letters_.size() + b] != 0; }

  // Same party, same copies, same input, different output.
  bool orthogonal(LetterId a, LetterId b) const {
    const Letter& x = letters_[a];
    const Letter& y = letters_[b];
    return !x.is_scalar() && !y.is_scalar() && x.party == y.party && x.input == y.input &&
           x.copies == y.copies && x.output != y.output;
  }

  // Letters sharing (party, copies, input); indexed by group id.
  int group(LetterId id) const { return group_of_[id]; }
  int num_groups() const { return static_cast<int>(groups_.size()); }
  const std::vector<LetterId>& group_letters(int g) const { return groups_.at(g); }

  std::optional<LetterId> find(int party, const std::vector<int>& copies, int input,
                               int output) const {
    auto it = index_.find(Key{party, copies, input, output});
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  LetterId measurement(int party, int input, int output) const {
    if (inflated()) throw std::invalid_argument("inflated alphabet needs copy indices");
    auto id = find(party, {}, input, output);
    if (!id) throw std::invalid_argument("no such letter");
    return *id;
  }

  LetterId inflated_letter(int party, const std::vector<int>& copies, int input, int output) const {
    auto id = find(party, copies, input, output);
    if (!id) throw std::invalid_argument("no such inflated letter");
    return *id;
  }

  std::optional<LetterId> scalar(const Word& payload) const {
    for (std::size_t i = 0; i < letters_.size(); ++i) {
      if (letters_[i].is_scalar() && letters_[i].payload == payload) {
        return static_cast<LetterId>(i);
      }
    }
    return std::nullopt;
  }

  Word word(std::initializer_list<LetterId> ls) const { return canonical(std::vector<LetterId>(ls)); }
  Word one() const { return Word({}, tag_); }

  Word canonical(std::span<const LetterId> seq) const { return canonical(seq, projective()); }

  // Reduce (idempotency, optional orthogonality), then pick the
  // lexicographically least linear extension of the partial commutation.
  Word canonical(std::span<const LetterId> in, bool orthogonality) const {
    std::vector<LetterId> seq(in.begin(), in.end());
    for (LetterId l : seq) {
      if (l >= letters_.size()) throw std::invalid_argument("letter outside alphabet");
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < seq.size() && !changed; ++i) {
        const LetterId li = seq[i];
        if (is_scalar(li)) continue;
        for (std::size_t j = i + 1; j < seq.size(); ++j) {
          const LetterId lj = seq[j];
          if (lj == li) {
            seq.erase(seq.begin() + static_cast<std::ptrdiff_t>(j));
            changed = true;
            break;
          }
          if (orthogonality && orthogonal(li, lj)) return Word::zero(tag_);
          if (!commute(li, lj)) break;
        }
      }
    }
    std::vector<LetterId> out;
    out.reserve(seq.size());
    std::vector<char> used(seq.size(), 0);
    for (std::size_t step = 0; step < seq.size(); ++step) {
      std::size_t best = seq.size();
      for (std::size_t p = 0; p < seq.size(); ++p) {
        if (used[p]) continue;
        if (best < seq.size() && seq[p] >= seq[best]) continue;
        bool avail = true;
        for (std::size_t q = 0; q < p; ++q) {
          if (!used[q] && !commute(seq[q], seq[p])) {
            avail = false;
            break;
          }
        }
        if (avail) best = p;
      }
      used[best] = 1;
      out.push_back(seq[best]);
    }
    return Word(std::move(out), tag_);
  }

  Word concat(const Word& a, const Word& b) const {
    check_tag(a);
    check_tag(b);
    if (a.is_zero() || b.is_zero()) return Word::zero(tag_);
    std::vector<LetterId> s = a.letters();
    s.insert(s.end(), b.letters().begin(), b.letters().end());
    return canonical(s);
  }

  Word involute(const Word& w) const {
    check_tag(w);
    if (w.is_zero()) return w;
    std::vector<LetterId> s(w.letters().rbegin(), w.letters().rend());
    return canonical(s);
  }

  // omega^dagger nu, the key of a moment-matrix cell
  Word pair(const Word& row, const Word& col) const {
    if (row.is_zero() || col.is_zero()) return Word::zero(tag_);
    std::vector<LetterId> s(row.letters().rbegin(), row.letters().rend());
    s.insert(s.end(), col.letters().begin(), col.letters().end());
    return canonical(s);
  }

  // All canonical words of length <= max_len, length-then-lex ordered.
  std::vector<Word> enumerate(int max_len,
                              std::size_t cap = std::numeric_limits<std::size_t>::max()) const {
    if (max_len < 0) throw std::invalid_argument("max_len must be >= 0");
    std::vector<Word> all{one()};
    std::unordered_set<Word, WordHash> seen{one()};
    std::vector<Word> layer{one()};
    for (int len = 1; len <= max_len; ++len) {
      std::vector<Word> next;
      for (const Word& w : layer) {
        std::vector<LetterId> s = w.letters();
        s.push_back(0);
        for (std::size_t l = 0; l < letters_.size(); ++l) {
          s.back() = static_cast<LetterId>(l);
          Word c = canonical(s);
          if (c.is_zero() || c.size() != static_cast<std::size_t>(len)) continue;
          if (seen.insert(c).second) next.push_back(std::move(c));
        }
      }
      std::sort(next.begin(), next.end());
      all.insert(all.end(), next.begin(), next.end());
      if (all.size() > cap) {
        throw std::length_error("word index exceeds cap of " + std::to_string(cap));
      }
      layer = std::move(next);
    }
    return all;
  }

  bool is_party_word(const Word& w, int party) const {
    for (LetterId l : w.letters()) {
      if (is_scalar(l) || letters_[l].party != party) return false;
    }
    return !w.is_zero();
  }

  bool has_last_outcome(const Word& w) const {
    for (LetterId l : w.letters()) {
      if (letters_[l].last_outcome) return true;
    }
    return false;
  }

  // Relabel copy indices, one permutation of {0..m-1} per source.
  Word act(const Word& w, const std::vector<std::vector<int>>& perms) const {
    if (!inflated()) throw std::invalid_argument("permutation action needs an inflated alphabet");
    check_tag(w);
    if (static_cast<int>(perms.size()) != net_.sources) {
      throw std::invalid_argument("need one permutation per source");
    }
    const int m = cfg_.inflation_order;
    for (const auto& p : perms) {
      std::vector<int> s = p;
      std::sort(s.begin(), s.end());
      for (int i = 0; i < m; ++i) {
        if (static_cast<int>(s.size()) != m || s[i] != i) {
          throw std::invalid_argument("not a permutation of the copy indices");
        }
      }
    }
    if (w.is_zero()) return w;
    std::vector<LetterId> s;
    s.reserve(w.size());
    for (LetterId id : w.letters()) {
      const Letter& l = letters_[id];
      std::vector<int> c = l.copies;
      for (std::size_t k = 0; k < c.size(); ++k) c[k] = perms[net_.legs[l.party][k]][c[k]];
      s.push_back(*find(l.party, c, l.input, l.output));
    }
    return canonical(s);
  }

  Word act(const Word& w, const std::vector<int>& theta, const std::vector<int>& theta_prime) const {
    return act(w, std::vector<std::vector<int>>{theta, theta_prime});
  }

  std::string render_letter(LetterId id) const {
    const Letter& l = letters_.at(id);
    if (l.is_scalar()) return "k{" + render(l.payload) + "}";
    std::string s(1, party_char(l.party));
    if (!l.copies.empty()) {
      s += "^{";
      for (std::size_t k = 0; k < l.copies.size(); ++k) {
        if (k) s += ",";
        s += std::to_string(l.copies[k]);
      }
      s += "}";
    }
    s += "[";
    s += output_char(l.party);
    s += "=" + std::to_string(l.output) + "|";
    s += input_char(l.party);
    s += "=" + std::to_string(l.input) + "]";
    return s;
  }

  std::string render(const Word& w) const {
    if (w.is_zero()) return "0";
    if (w.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) s += " ";
      s += render_letter(w[i]);
    }
    return s;
  }

  Word parse(std::string_view text) const {
    std::vector<LetterId> seq;
    std::size_t pos = 0;
    auto skip = [&] {
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    };
    skip();
    if (text.substr(pos) == "1") return one();
    if (text.substr(pos) == "0") return Word::zero(tag_);
    while (true) {
      skip();
      if (pos >= text.size()) break;
      seq.push_back(parse_letter(text, pos));
    }
    return canonical(seq);
  }

 private:
  struct Key {
    int party;
    std::vector<int> copies;
    int input;
    int output;
    auto operator<=>(const Key&) const = default;
  };

  std::vector<Letter> measurement_letters() const {
    std::vector<Letter> out;
    const Scenario& sc = cfg_.scenario;
    const int m = cfg_.inflation_order;
    for (int p = 0; p < sc.parties(); ++p) {
      std::vector<std::vector<int>> copy_sets{{}};
      if (m > 0) {
        for (std::size_t leg = 0; leg < net_.legs[p].size(); ++leg) {
          std::vector<std::vector<int>> grown;
          for (const auto& c : copy_sets) {
            for (int i = 0; i < m; ++i) {
              auto d = c;
              d.push_back(i);
              grown.push_back(std::move(d));
            }
          }
          copy_sets = std::move(grown);
        }
      }
      for (const auto& c : copy_sets) {
        for (int x = 0; x < sc.inputs[p]; ++x) {
          const int last = sc.outputs[p] - 1;
          for (int a = 0; a <= last; ++a) {
            if (a == last && cfg_.encoding == OutcomeEncoding::drop_last) continue;
            Letter l;
            l.party = p;
            l.input = x;
            l.output = a;
            l.copies = c;
            l.last_outcome = (a == last);
            out.push_back(std::move(l));
          }
        }
      }
    }
    return out;
  }

  std::uint64_t fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](std::uint64_t v) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    mix(static_cast<std::uint64_t>(cfg_.scenario.topology));
    for (int v : cfg_.scenario.inputs) mix(v);
    for (int v : cfg_.scenario.outputs) mix(v);
    mix(static_cast<std::uint64_t>(cfg_.encoding));
    mix(cfg_.inflation_order);
    mix(cfg_.scalar_length);
    return h | 1;
  }

  void build_tables() {
    const std::size_t n = letters_.size();
    comm_.assign(n * n, 0);
    group_of_.assign(n, -1);
    std::map<Key, int> groups;
    for (std::size_t a = 0; a < n; ++a) {
      const Letter& x = letters_[a];
      if (!x.is_scalar()) {
        index_[Key{x.party, x.copies, x.input, x.output}] = static_cast<LetterId>(a);
        Key g{x.party, x.copies, x.input, 0};
        auto [it, fresh] = groups.try_emplace(g, static_cast<int>(groups_.size()));
        if (fresh) groups_.emplace_back();
        groups_[it->second].push_back(static_cast<LetterId>(a));
        group_of_[a] = it->second;
      }
      for (std::size_t b = 0; b < n; ++b) {
        const Letter& y = letters_[b];
        bool c;
        if (a == b || x.is_scalar() || y.is_scalar() || x.party != y.party) {
          c = true;
        } else if (!inflated()) {
          c = false;
        } else {
          c = true;
          for (std::size_t k = 0; k < x.copies.size(); ++k) {
            if (x.copies[k] == y.copies[k]) c = false;
          }
        }
        comm_[a * n + b] = c ? 1 : 0;
      }
    }
  }

  void check_tag(const Word& w) const {
    if (w.alphabet_tag() != 0 && w.alphabet_tag() != tag_) {
      throw std::invalid_argument("alphabet mismatch");
    }
  }

  LetterId parse_letter(std::string_view t, std::size_t& pos) const {
    auto fail = [&](const std::string& why) -> LetterId {
      throw ParseError("bad word near '" + std::string(t.substr(pos)) + "': " + why);
    };
    if (t[pos] == 'k') {
      if (pos + 1 >= t.size() || t[pos + 1] != '{') return fail("expected k{");
      std::size_t depth = 0, end = pos + 1;
      for (; end < t.size(); ++end) {
        if (t[end] == '{') ++depth;
        if (t[end] == '}' && --depth == 0) break;
      }
      if (end >= t.size()) return fail("unbalanced braces");
      Word payload = parse(t.substr(pos + 2, end - pos - 2));
      auto id = scalar(payload);
      if (!id) return fail("unknown scalar letter");
      pos = end + 1;
      return *id;
    }
    const int party = t[pos] - 'A';
    if (party < 0 || party >= cfg_.scenario.parties()) return fail("unknown party");
    ++pos;
    std::vector<int> copies;
    auto number = [&]() -> int {
      std::size_t start = pos;
      while (pos < t.size() && t[pos] >= '0' && t[pos] <= '9') ++pos;
      if (start == pos) fail("expected a number");
      return std::stoi(std::string(t.substr(start, pos - start)));
    };
    auto expect = [&](char c) {
      if (pos >= t.size() || t[pos] != c) fail(std::string("expected '") + c + "'");
      ++pos;
    };
    if (pos < t.size() && t[pos] == '^') {
      ++pos;
      expect('{');
      copies.push_back(number());
      while (pos < t.size() && t[pos] == ',') {
        ++pos;
        copies.push_back(number());
      }
      expect('}');
    }
    expect('[');
    expect(output_char(party));
    expect('=');
    const int out = number();
    expect('|');
    expect(input_char(party));
    expect('=');
    const int in = number();
    expect(']');
    auto id = find(party, copies, in, out);
    if (!id) return fail("letter not in alphabet");
    return *id;
  }

  AlphabetConfig cfg_;
  Network net_;
  std::vector<Letter> letters_;
  std::uint64_t tag_ = 0;
  std::vector<std::uint8_t> comm_;
  std::map<Key, LetterId> index_;
  std::vector<int> group_of_;
  std::vector<std::vector<LetterId>> groups_;
};

}  // namespace netnpa
