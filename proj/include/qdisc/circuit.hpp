#pragma once

// Gate-level measurement circuits. Qubit 0 is the most significant bit of a
// computational-basis index, so a register |q0 q1 ...> maps to kron(U_q0, U_q1, ...).

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qdisc/errors.hpp"
#include "qdisc/linalg.hpp"

namespace qdisc {

enum class GateKind { ry, rz, u3, cnot };

struct Gate {
  GateKind kind = GateKind::ry;
  std::array<int, 2> qubits{0, 0};  // {target} for 1-qubit gates, {control, target} for CNOT
  std::array<double, 3> angles{0.0, 0.0, 0.0};

  static Gate ry(int q, double theta) { return {GateKind::ry, {q, q}, {theta, 0.0, 0.0}}; }
  static Gate rz(int q, double theta) { return {GateKind::rz, {q, q}, {theta, 0.0, 0.0}}; }
  static Gate u3(int q, double theta, double phi, double lambda) {
    return {GateKind::u3, {q, q}, {theta, phi, lambda}};
  }
  static Gate cnot(int control, int target) {
    return {GateKind::cnot, {control, target}, {0.0, 0.0, 0.0}};
  }

  bool two_qubit() const noexcept { return kind == GateKind::cnot; }
  int parameter_count() const noexcept {
    switch (kind) {
      case GateKind::ry:
      case GateKind::rz:
        return 1;
      case GateKind::u3:
        return 3;
      case GateKind::cnot:
        return 0;
    }
    return 0;
  }

  friend bool operator==(const Gate&, const Gate&) = default;
};

// RY(t) = exp(-i t Y / 2), RZ(t) = exp(-i t Z / 2),
// U3(t, p, l) = [[cos(t/2), -e^{il} sin(t/2)], [e^{ip} sin(t/2), e^{i(p+l)} cos(t/2)]],
// CNOT on the ordered pair (control, target).
inline ComplexMatrix gate_unitary(const Gate& g) {
  const double t = g.angles[0];
  const double c = std::cos(t / 2);
  const double s = std::sin(t / 2);
  ComplexMatrix m;
  switch (g.kind) {
    case GateKind::ry:
      m.resize(2, 2);
      m << c, -s, s, c;
      return m;
    case GateKind::rz:
      m.resize(2, 2);
      m << std::polar(1.0, -t / 2), 0, 0, std::polar(1.0, t / 2);
      return m;
    case GateKind::u3: {
      const double phi = g.angles[1];
      const double lambda = g.angles[2];
      m.resize(2, 2);
      m << c, -std::polar(s, lambda), std::polar(s, phi), std::polar(c, phi + lambda);
      return m;
    }
    case GateKind::cnot:
      m = ComplexMatrix::Zero(4, 4);
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
      return m;
  }
  throw DomainError("gate_unitary: unknown gate kind");
}

// Derivative of a 1-qubit gate's matrix with respect to angle `k`.
inline ComplexMatrix gate_derivative(const Gate& g, int k) {
  const double t = g.angles[0];
  const double c = std::cos(t / 2);
  const double s = std::sin(t / 2);
  const Complex i(0.0, 1.0);
  ComplexMatrix m(2, 2);
  switch (g.kind) {
    case GateKind::ry:
      m << -s / 2, -c / 2, c / 2, -s / 2;
      return m;
    case GateKind::rz:
      m << -0.5 * i * std::polar(1.0, -t / 2), 0, 0, 0.5 * i * std::polar(1.0, t / 2);
      return m;
    case GateKind::u3: {
      const double phi = g.angles[1];
      const double lambda = g.angles[2];
      if (k == 0) {
        m << -s / 2, -std::polar(c / 2, lambda), std::polar(c / 2, phi),
            -std::polar(s / 2, phi + lambda);
      } else if (k == 1) {
        m << 0, 0, i * std::polar(s, phi), i * std::polar(c, phi + lambda);
      } else {
        m << 0, -i * std::polar(s, lambda), 0, i * std::polar(c, phi + lambda);
      }
      return m;
    }
    case GateKind::cnot:
      break;
  }
  throw DomainError("gate_derivative: gate has no parameters");
}

namespace detail {
inline int bit_of(Eigen::Index index, int qubit, int width) {
  return static_cast<int>((index >> (width - 1 - qubit)) & 1);
}
}  // namespace detail

// Lift a 2x2 matrix acting on `qubit` to the full register.
inline ComplexMatrix embed_single(const ComplexMatrix& u, int qubit, int width) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int k = 0; k < width; ++k) out = kron(out, k == qubit ? u : pauli::identity());
  return out;
}

inline ComplexMatrix embed_cnot(int control, int target, int width) {
  const Eigen::Index dim = Eigen::Index{1} << width;
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  const Eigen::Index flip = Eigen::Index{1} << (width - 1 - target);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const Eigen::Index image = detail::bit_of(b, control, width) ? (b ^ flip) : b;
    out(image, b) = 1.0;
  }
  return out;
}

class Circuit {
 public:
  explicit Circuit(int width, std::vector<Gate> gates = {}) : width_(width) {
    if (width < 1 || width > 6) throw DomainError("Circuit: width must lie in [1, 6]");
    for (auto& g : gates) add(g);
  }

  void add(const Gate& g) {
    for (int k = 0; k < (g.two_qubit() ? 2 : 1); ++k) {
      if (g.qubits[k] < 0 || g.qubits[k] >= width_) {
        throw DomainError("Circuit: qubit index " + std::to_string(g.qubits[k]) +
                          " outside width " + std::to_string(width_));
      }
    }
    if (g.two_qubit() && g.qubits[0] == g.qubits[1]) {
      throw DomainError("Circuit: CNOT control equals target");
    }
    for (double a : g.angles) {
      if (!std::isfinite(a)) throw DomainError("Circuit: non-finite gate angle");
    }
    gates_.push_back(g);
  }

  int width() const noexcept { return width_; }
  const std::vector<Gate>& gates() const noexcept { return gates_; }

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  int width_;
  std::vector<Gate> gates_;
};

inline ComplexMatrix embedded_unitary(const Gate& g, int width) {
  if (g.two_qubit()) return embed_cnot(g.qubits[0], g.qubits[1], width);
  return embed_single(gate_unitary(g), g.qubits[0], width);
}

// Gates apply in list order, so the first gate is the rightmost factor.
inline ComplexMatrix unitary_of(const Circuit& c) {
  const Eigen::Index dim = Eigen::Index{1} << c.width();
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  for (const auto& g : c.gates()) u = embedded_unitary(g, c.width()) * u;
  return u;
}

// |tr(u^dagger v)|^2 / d^2; insensitive to global phase.
inline double fidelity(const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols() || !is_square(u)) {
    throw DimensionError("fidelity: matrices must be square and of equal size");
  }
  const double d = static_cast<double>(u.rows());
  return std::norm((u.adjoint() * v).trace()) / (d * d);
}

// Fifteen angles of the generic three-CNOT two-qubit circuit, in gate order:
// U3 on q0 and q1 (entry layer), RZ on q0, RY on q1, RY on q1, U3 on q0 and q1 (exit layer).
using AnsatzParams = std::array<double, 15>;

// U3(q0) U3(q1) - CNOT(1->0) - RZ(q0) RY(q1) - CNOT(0->1) - RY(q1) - CNOT(1->0) - U3(q0) U3(q1)
inline Circuit ansatz_circuit(const AnsatzParams& p) {
  Circuit c(2);
  c.add(Gate::u3(0, p[0], p[1], p[2]));
  c.add(Gate::u3(1, p[3], p[4], p[5]));
  c.add(Gate::cnot(1, 0));
  c.add(Gate::rz(0, p[6]));
  c.add(Gate::ry(1, p[7]));
  c.add(Gate::cnot(0, 1));
  c.add(Gate::ry(1, p[8]));
  c.add(Gate::cnot(1, 0));
  c.add(Gate::u3(0, p[9], p[10], p[11]));
  c.add(Gate::u3(1, p[12], p[13], p[14]));
  return c;
}

// Line format: "QUBITS n" header, then one gate per line
// ("RY q t", "RZ q t", "U3 q t p l", "CNOT c t"), angles with 17 significant digits.
inline std::string format_angle(double a) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", a);
  return buf;
}

inline void write_circuit(std::ostream& os, const Circuit& c) {
  os << "QUBITS " << c.width() << '\n';
  for (const auto& g : c.gates()) {
    switch (g.kind) {
      case GateKind::ry:
        os << "RY " << g.qubits[0] << ' ' << format_angle(g.angles[0]) << '\n';
        break;
      case GateKind::rz:
        os << "RZ " << g.qubits[0] << ' ' << format_angle(g.angles[0]) << '\n';
        break;
      case GateKind::u3:
        os << "U3 " << g.qubits[0] << ' ' << format_angle(g.angles[0]) << ' '
           << format_angle(g.angles[1]) << ' ' << format_angle(g.angles[2]) << '\n';
        break;
      case GateKind::cnot:
        os << "CNOT " << g.qubits[0] << ' ' << g.qubits[1] << '\n';
        break;
    }
  }
}

inline std::string to_text(const Circuit& c) {
  std::ostringstream os;
  write_circuit(os, c);
  return os.str();
}

inline Circuit read_circuit(std::istream& is) {
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& why) -> DomainError {
    return DomainError("circuit line " + std::to_string(line_no) + ": " + why);
  };
  auto next_line = [&]() {
    while (std::getline(is, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw DomainError("circuit: missing QUBITS header");
  std::istringstream header(line);
  std::string tag;
  int width = 0;
  if (!(header >> tag >> width) || tag != "QUBITS") throw fail("expected 'QUBITS n'");
  Circuit c(width);
  while (next_line()) {
    std::istringstream ls(line);
    std::string op;
    ls >> op;
    Gate g;
    bool ok = false;
    if (op == "RY" || op == "RZ") {
      int q = 0;
      double t = 0;
      ok = static_cast<bool>(ls >> q >> t);
      g = op == "RY" ? Gate::ry(q, t) : Gate::rz(q, t);
    } else if (op == "U3") {
      int q = 0;
      double t = 0, p = 0, l = 0;
      ok = static_cast<bool>(ls >> q >> t >> p >> l);
      g = Gate::u3(q, t, p, l);
    } else if (op == "CNOT") {
      int ctl = 0, tgt = 0;
      ok = static_cast<bool>(ls >> ctl >> tgt);
      g = Gate::cnot(ctl, tgt);
    } else {
      throw fail("unknown gate '" + op + "'");
    }
    std::string extra;
    if (!ok || (ls >> extra)) throw fail("malformed operands");
    try {
      c.add(g);
    } catch (const DomainError& e) {
      throw fail(e.what());
    }
  }
  return c;
}

inline Circuit circuit_from_text(const std::string& text) {
  std::istringstream is(text);
  return read_circuit(is);
}

}  // namespace qdisc
