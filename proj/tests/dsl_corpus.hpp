#pragma once

#include <random>
#include <string>
#include <vector>

namespace gltlab::testing {

inline const std::vector<std::string>& dsl_corpus() {
  static const std::vector<std::string> corpus = {
      "T(2 - 2*cos(t1))",
      "T(4 - 2*cos(t1) - 2*cos(t2))",
      "D(x1)*T(2 - 2*cos(t1))",
      "T([0, 1 + exp(-i*t1); 1 + exp(i*t1), 0])",
      "T(abs(t1); 8)",
      "T(2 - 2*cos(t1))^-1",
      "fun(exp, T(2 - 2*cos(t1)))",
      "fun(poly[1,0,-0.5], D(x1^2 + 1))",
      "2*T(cos(t1)) - 0.5*D(x1)",
      "T(exp(i*t1))'",
      "Z",
      "T(2 - 2*cos(t1)) + Z[spikes]",
      "(T(1 + sin(t1)) + D(x1))*(T(cos(2*t1)) - 3)",
      "D([x1, 0; 0, 1 - x1])*T([2, -1; -1, 2])",
      "T(cos(t1)*cos(t2))*D(x1*x2)",
      "-T(2 - 2*cos(t1)) + 3*D(sin(pi*x1))",
      "fun(abs, T(cos(t1)) - D(x1))",
      "(D(x1)*T(2 - 2*cos(t1)))'*D(exp(x1))",
      "T((2 - 2*cos(t1))^2)^-1*T(1)",
      "fun(cos, fun(sin, T(cos(t1) + cos(3*t1))))",
  };
  return corpus;
}

/// Random well-formed expression text of nesting depth at most `depth`.
class DslGenerator {
 public:
  explicit DslGenerator(std::uint64_t seed) : rng_(seed) {}

  std::string any(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(7)) {
      case 0: return leaf();
      case 1: return weight() + "*" + group(any(depth - 1)) + " + " + group(any(depth - 1));
      case 2: return group(any(depth - 1)) + "*" + group(any(depth - 1));
      case 3: return group(any(depth - 1)) + "'";
      case 4: return group(hermitian(depth - 1)) + "^-1";
      case 5: return "fun(" + function() + ", " + hermitian(depth - 1) + ")";
      default: return group(any(depth - 1)) + " - " + group(any(depth - 1));
    }
  }

  std::string hermitian(int depth) {
    if (depth <= 0) return hermitian_leaf();
    switch (pick(4)) {
      case 0: return hermitian_leaf();
      case 1: return weight() + "*" + group(hermitian(depth - 1)) + " - " + group(hermitian(depth - 1));
      case 2: return group(hermitian(depth - 1)) + "'";
      default: return "fun(" + function() + ", " + hermitian(depth - 1) + ")";
    }
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  static std::string group(const std::string& s) { return "(" + s + ")"; }
  std::string weight() {
    static const char* ws[] = {"2", "0.5", "-1.25", "3", "1e-3"};
    return ws[pick(5)];
  }
  std::string function() {
    static const char* fs[] = {"exp", "sin", "cos", "abs", "poly[1,2]", "poly[0,0,1]"};
    return fs[pick(6)];
  }
  std::string leaf() {
    static const char* ls[] = {"T(exp(i*t1))", "D(x1 + i*x1^2)", "T(1 + 2*sin(t1))", "Z", "2.5"};
    return pick(3) == 0 ? ls[pick(5)] : hermitian_leaf();
  }
  std::string hermitian_leaf() {
    static const char* ls[] = {"T(2 - 2*cos(t1))", "D(x1^2)", "T(cos(2*t1) - 1)", "Z[spikes]", "D(cos(pi*x1))",
                               "T(abs(t1); 6)"};
    return ls[pick(6)];
  }

  std::mt19937_64 rng_;
};

/// Random printable and control bytes biased toward language tokens.
inline std::string fuzz_input(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {"T(", "D(", ")", "(", "[", "]", ";", ",", "*", "+", "-", "^",
                                                  "^-1", "'", "x1", "t1", "t2", "x9", "cos", "exp(", "i", "pi",
                                                  "fun(", "poly[", "Z", "Z[spikes]", "2", "0.5", "1e400", " ",
                                                  "\n", "abs", "/", "0", "e", "."};
  std::uniform_int_distribution<int> len(0, 40);
  std::uniform_int_distribution<int> coin(0, 3);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<std::size_t> piece(0, pieces.size() - 1);
  std::string s;
  const int n = len(rng);
  for (int k = 0; k < n; ++k) {
    if (coin(rng) == 0)
      s.push_back(static_cast<char>(byte(rng)));
    else
      s += pieces[piece(rng)];
  }
  return s;
}

}  // namespace gltlab::testing
