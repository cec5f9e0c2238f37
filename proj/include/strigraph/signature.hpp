// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "strigraph/error.hpp"

namespace strigraph {

enum class DataKind : std::uint8_t { kNone, kAngle, kOpaque };

std::string_view to_string(DataKind kind);
std::optional<DataKind> data_kind_from_string(std::string_view text);

/// Exact rational multiple of pi, normalized into [0, 2).
class Angle {
 public:
  static constexpr std::int64_t kMaxDenominator = 360;

  Angle() = default;
  /// Throws kMalformedGraph when den is zero or the reduced denominator
  /// exceeds kMaxDenominator.
  Angle(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double radians() const;

  /// "k/n" with the pi factor implicit; "0" for the zero angle.
  std::string str() const;
  static Angle parse(std::string_view text);

  friend Angle operator+(const Angle& a, const Angle& b);
  friend Angle operator-(const Angle& a);
  friend auto operator<=>(const Angle&, const Angle&) = default;
  friend bool operator==(const Angle&, const Angle&) = default;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Per-vertex payload for data-carrying generators.
using VertexData = std::variant<std::monostate, Angle, std::string>;

std::string data_to_string(const VertexData& data);

struct ObjectType {
  std::string name;
  std::optional<int> dim;
};

struct MorphismType {
  std::string name;
  std::vector<std::string> dom;
  std::vector<std::string> cod;
  DataKind data_kind = DataKind::kNone;
};

bool is_identifier(std::string_view text);

class Signature {
 public:
  static constexpr std::uint32_t kUnresolved = 0xffffffffu;

  Signature() = default;
  Signature(std::vector<ObjectType> objects, std::vector<MorphismType> morphisms);

  const std::vector<ObjectType>& objects() const { return objects_; }
  const std::vector<MorphismType>& morphisms() const { return morphisms_; }
  const ObjectType& object(std::uint32_t index) const { return objects_.at(index); }
  const MorphismType& morphism(std::uint32_t index) const { return morphisms_.at(index); }

  std::optional<std::uint32_t> object_index(std::string_view name) const;
  std::optional<std::uint32_t> morphism_index(std::string_view name) const;
  /// Throws kInvalidSignature for unknown names.
  std::uint32_t require_object(std::string_view name) const;
  std::uint32_t require_morphism(std::string_view name) const;

  /// Object index of the i-th input / j-th output of a morphism, or
  /// kUnresolved when the signature references an undeclared object.
  std::uint32_t dom_type(std::uint32_t morphism, std::uint32_t port) const;
  std::uint32_t cod_type(std::uint32_t morphism, std::uint32_t port) const;
  std::uint32_t arity_in(std::uint32_t morphism) const;
  std::uint32_t arity_out(std::uint32_t morphism) const;

  friend bool operator==(const Signature& a, const Signature& b);

 private:
  std::vector<ObjectType> objects_;
  std::vector<MorphismType> morphisms_;
  std::unordered_map<std::string, std::uint32_t> object_lookup_;
  std::unordered_map<std::string, std::uint32_t> morphism_lookup_;
  std::vector<std::vector<std::uint32_t>> dom_types_;
  std::vector<std::vector<std::uint32_t>> cod_types_;
};

using SignaturePtr = std::shared_ptr<const Signature>;

/// Empty iff the signature is well-formed.
std::vector<Violation> validate_signature(const Signature& sig);

/// Builds a shared signature, throwing kInvalidSignature on any violation.
SignaturePtr make_signature(std::vector<ObjectType> objects, std::vector<MorphismType> morphisms);

enum class EdgeKind : std::uint8_t { kMid, kIn, kOut };

std::string_view to_string(EdgeKind kind);

struct TypeGraph {
  enum class VertexKind : std::uint8_t { kObject, kMorphism };
  struct Vertex {
    VertexKind kind;
    std::string name;
  };
  /// Endpoints index into `vertices`; objects come first, then morphisms.
  struct Edge {
    EdgeKind kind;
    std::uint32_t src;
    std::uint32_t tgt;
    std::string morphism;
    std::uint32_t port = 0;
  };
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;

  std::string serialize() const;
};

TypeGraph derive_typegraph(const Signature& sig);

}  // namespace strigraph
