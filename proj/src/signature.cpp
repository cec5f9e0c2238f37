// SPDX-License-Identifier: Apache-2.0
#include "strigraph/signature.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

namespace strigraph {

std::string_view to_string(DataKind kind) {
  switch (kind) {
    case DataKind::kNone: return "none";
    case DataKind::kAngle: return "angle";
    case DataKind::kOpaque: return "opaque";
  }
  return "none";
}

std::optional<DataKind> data_kind_from_string(std::string_view text) {
  if (text == "none") return DataKind::kNone;
  if (text == "angle") return DataKind::kAngle;
  if (text == "opaque") return DataKind::kOpaque;
  return std::nullopt;
}

Angle::Angle(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::kMalformedGraph, "angle with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (den > kMaxDenominator) {
    throw Error(ErrorCode::kMalformedGraph, "angle denominator exceeds 360");
  }
  const std::int64_t period = 2 * den;
  num %= period;
  if (num < 0) num += period;
  num_ = num;
  den_ = num == 0 ? 1 : den;
}

double Angle::radians() const {
  return std::numbers::pi * static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Angle::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Angle Angle::parse(std::string_view text) {
  auto parse_int = [&](std::string_view part) {
    std::int64_t value = 0;
    const char* first = part.data();
    const char* last = part.data() + part.size();
    if (!part.empty() && part.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last) {
      throw Error(ErrorCode::kParseError, "bad angle '" + std::string(text) + "'");
    }
    return value;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Angle(parse_int(text), 1);
  return Angle(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

Angle operator+(const Angle& a, const Angle& b) {
  const std::int64_t l = std::lcm(a.den_, b.den_);
  return Angle(a.num_ * (l / a.den_) + b.num_ * (l / b.den_), l);
}

Angle operator-(const Angle& a) { return Angle(-a.num_, a.den_); }

std::string data_to_string(const VertexData& data) {
  if (const auto* angle = std::get_if<Angle>(&data)) return "angle:" + angle->str();
  if (const auto* token = std::get_if<std::string>(&data)) return "token:" + *token;
  return "";
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  for (char c : text) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

Signature::Signature(std::vector<ObjectType> objects, std::vector<MorphismType> morphisms)
    : objects_(std::move(objects)), morphisms_(std::move(morphisms)) {
  for (std::uint32_t i = 0; i < objects_.size(); ++i) object_lookup_.emplace(objects_[i].name, i);
  for (std::uint32_t i = 0; i < morphisms_.size(); ++i) morphism_lookup_.emplace(morphisms_[i].name, i);
  auto resolve = [&](const std::vector<std::string>& names) {
    std::vector<std::uint32_t> out;
    out.reserve(names.size());
    for (const auto& name : names) {
      auto it = object_lookup_.find(name);
      out.push_back(it == object_lookup_.end() ? kUnresolved : it->second);
    }
    return out;
  };
  for (const auto& m : morphisms_) {
    dom_types_.push_back(resolve(m.dom));
    cod_types_.push_back(resolve(m.cod));
  }
}

std::optional<std::uint32_t> Signature::object_index(std::string_view name) const {
  auto it = object_lookup_.find(std::string(name));
  if (it == object_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> Signature::morphism_index(std::string_view name) const {
  auto it = morphism_lookup_.find(std::string(name));
  if (it == morphism_lookup_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t Signature::require_object(std::string_view name) const {
  if (auto i = object_index(name)) return *i;
  throw Error(ErrorCode::kInvalidSignature, "unknown object type '" + std::string(name) + "'");
}

std::uint32_t Signature::require_morphism(std::string_view name) const {
  if (auto i = morphism_index(name)) return *i;
  throw Error(ErrorCode::kInvalidSignature, "unknown morphism type '" + std::string(name) + "'");
}

std::uint32_t Signature::dom_type(std::uint32_t morphism, std::uint32_t port) const {
  return dom_types_.at(morphism).at(port);
}

std::uint32_t Signature::cod_type(std::uint32_t morphism, std::uint32_t port) const {
  return cod_types_.at(morphism).at(port);
}

std::uint32_t Signature::arity_in(std::uint32_t morphism) const {
  return static_cast<std::uint32_t>(dom_types_.at(morphism).size());
}

std::uint32_t Signature::arity_out(std::uint32_t morphism) const {
  return static_cast<std::uint32_t>(cod_types_.at(morphism).size());
}

bool operator==(const Signature& a, const Signature& b) {
  if (a.objects_.size() != b.objects_.size() || a.morphisms_.size() != b.morphisms_.size()) return false;
  for (std::size_t i = 0; i < a.objects_.size(); ++i) {
    if (a.objects_[i].name != b.objects_[i].name || a.objects_[i].dim != b.objects_[i].dim) return false;
  }
  for (std::size_t i = 0; i < a.morphisms_.size(); ++i) {
    const auto& x = a.morphisms_[i];
    const auto& y = b.morphisms_[i];
    if (x.name != y.name || x.dom != y.dom || x.cod != y.cod || x.data_kind != y.data_kind) return false;
  }
  return true;
}

std::vector<Violation> validate_signature(const Signature& sig) {
  std::vector<Violation> out;
  std::set<std::string> seen_objects;
  for (const auto& o : sig.objects()) {
    if (!is_identifier(o.name)) out.push_back({"InvalidName", o.name});
    if (!seen_objects.insert(o.name).second) out.push_back({"DuplicateName", o.name});
    if (o.dim && *o.dim < 1) out.push_back({"InvalidDimension", o.name});
  }
  std::set<std::string> seen_morphisms;
  for (const auto& m : sig.morphisms()) {
    if (!is_identifier(m.name)) out.push_back({"InvalidName", m.name});
    if (!seen_morphisms.insert(m.name).second) out.push_back({"DuplicateName", m.name});
    for (const auto* list : {&m.dom, &m.cod}) {
      for (const auto& name : *list) {
        if (!seen_objects.count(name)) out.push_back({"UnknownObject", name});
      }
    }
  }
  return out;
}

SignaturePtr make_signature(std::vector<ObjectType> objects, std::vector<MorphismType> morphisms) {
  auto sig = std::make_shared<Signature>(std::move(objects), std::move(morphisms));
  auto violations = validate_signature(*sig);
  if (!violations.empty()) {
    std::string detail;
    for (const auto& v : violations) detail += (detail.empty() ? "" : ", ") + v.str();
    throw Error(ErrorCode::kInvalidSignature, detail);
  }
  return sig;
}

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kMid: return "mid";
    case EdgeKind::kIn: return "in";
    case EdgeKind::kOut: return "out";
  }
  return "mid";
}

TypeGraph derive_typegraph(const Signature& sig) {
  auto violations = validate_signature(sig);
  if (!violations.empty()) throw Error(ErrorCode::kInvalidSignature, violations.front().str());
  TypeGraph tg;
  const auto n_obj = static_cast<std::uint32_t>(sig.objects().size());
  for (const auto& o : sig.objects()) tg.vertices.push_back({TypeGraph::VertexKind::kObject, o.name});
  for (const auto& m : sig.morphisms()) tg.vertices.push_back({TypeGraph::VertexKind::kMorphism, m.name});
  for (std::uint32_t x = 0; x < n_obj; ++x) tg.edges.push_back({EdgeKind::kMid, x, x, "", 0});
  for (std::uint32_t f = 0; f < sig.morphisms().size(); ++f) {
    const auto& m = sig.morphism(f);
    for (std::uint32_t i = 0; i < sig.arity_in(f); ++i) {
      tg.edges.push_back({EdgeKind::kIn, sig.dom_type(f, i), n_obj + f, m.name, i});
    }
    for (std::uint32_t j = 0; j < sig.arity_out(f); ++j) {
      tg.edges.push_back({EdgeKind::kOut, n_obj + f, sig.cod_type(f, j), m.name, j});
    }
  }
  return tg;
}

std::string TypeGraph::serialize() const {
  std::ostringstream os;
  for (const auto& v : vertices) os << (v.kind == VertexKind::kObject ? "O " : "M ") << v.name << "\n";
  for (const auto& e : edges) {
    os << to_string(e.kind) << " " << e.src << " " << e.tgt;
    if (e.kind != EdgeKind::kMid) os << " " << e.morphism << " " << e.port;
    os << "\n";
  }
  return os.str();
}

}  // namespace strigraph
