#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace netnpa {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScenarioMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// bell2 is the bipartite Bell scenario, used for CHSH-type sanity checks.
enum class Topology { bell2, bell3, bilocal, triangle, star4 };

inline std::string_view topology_name(Topology t) {
  switch (t) {
    case Topology::bell2: return "bell2";
    case Topology::bell3: return "bell3";
    case Topology::bilocal: return "bilocal";
    case Topology::triangle: return "triangle";
    case Topology::star4: return "star4";
  }
  return "?";
}

inline Topology parse_topology(std::string_view s) {
  for (Topology t : {Topology::bell2, Topology::bell3, Topology::bilocal,
                     Topology::triangle, Topology::star4}) {
    if (topology_name(t) == s) return t;
  }
  throw ParseError("unknown topology '" + std::string(s) + "'");
}

// Sources and the legs each party holds. legs[p] lists the sources seen by
// party p in the order used for inflation copy indices.
struct Network {
  Topology topology = Topology::bell3;
  int parties = 0;
  int sources = 0;
  std::vector<std::vector<int>> legs;
};

inline Network network_of(Topology t) {
  Network n;
  n.topology = t;
  switch (t) {
    case Topology::bell2:
      n.parties = 2;
      n.sources = 1;
      n.legs = {{0}, {0}};
      break;
    case Topology::bell3:
      n.parties = 3;
      n.sources = 1;
      n.legs = {{0}, {0}, {0}};
      break;
    case Topology::bilocal:
      // source 0 = rho (A-B), source 1 = sigma (B-C)
      n.parties = 3;
      n.sources = 2;
      n.legs = {{0}, {0, 1}, {1}};
      break;
    case Topology::triangle:
      // source 0 = rho (A-B), 1 = sigma (B-C), 2 = pi (C-A).
      // A^{i,j}: (pi, rho), B^{k,l}: (rho, sigma), C^{p,q}: (sigma, pi).
      n.parties = 3;
      n.sources = 3;
      n.legs = {{2, 0}, {0, 1}, {1, 2}};
      break;
    case Topology::star4:
      // B is the centre: rho (A-B), sigma (B-C), pi (B-D).
      n.parties = 4;
      n.sources = 3;
      n.legs = {{0}, {0, 1, 2}, {1}, {2}};
      break;
  }
  return n;
}

struct Scenario {
  Topology topology = Topology::bell3;
  std::vector<int> inputs;
  std::vector<int> outputs;

  static Scenario make(Topology t, std::vector<int> inputs, std::vector<int> outputs) {
    Scenario s{t, std::move(inputs), std::move(outputs)};
    s.validate();
    return s;
  }

  static Scenario uniform(Topology t, int inputs, int outputs) {
    const int p = network_of(t).parties;
    return make(t, std::vector<int>(p, inputs), std::vector<int>(p, outputs));
  }

  int parties() const { return static_cast<int>(inputs.size()); }
  Network network() const { return network_of(topology); }

  void validate() const {
    const int p = network_of(topology).parties;
    if (static_cast<int>(inputs.size()) != p || static_cast<int>(outputs.size()) != p) {
      throw std::invalid_argument("scenario " + std::string(topology_name(topology)) +
                                  " needs " + std::to_string(p) + " parties");
    }
    for (int i = 0; i < p; ++i) {
      if (inputs[i] < 1 || outputs[i] < 1) {
        throw std::invalid_argument("cardinalities must be >= 1");
      }
    }
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline char party_char(int p) { return static_cast<char>('A' + p); }
inline char output_char(int p) { return "abcd"[p]; }
inline char input_char(int p) { return "xyzw"[p]; }

}  // namespace netnpa
