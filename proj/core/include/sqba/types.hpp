#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sqba {

using ProcessId = std::uint32_t;
using Bytes = std::vector<std::uint8_t>;

// Binary-or-bottom value. Bottom sorts after 0 and 1.
enum class Value : std::uint8_t { Zero = 0, One = 1, Bottom = 2 };

inline constexpr Value value_of_bit(int b) { return b ? Value::One : Value::Zero; }
inline constexpr bool is_binary(Value v) { return v != Value::Bottom; }
inline constexpr int bit_of(Value v) { return v == Value::One ? 1 : 0; }

std::string to_string(Value v);

// Small ordered set over {0, 1, bottom}.
class ValueSet {
 public:
  constexpr ValueSet() = default;
  static constexpr ValueSet of(Value v) {
    ValueSet s;
    s.insert(v);
    return s;
  }
  constexpr void insert(Value v) { bits_ |= std::uint8_t(1u << std::uint8_t(v)); }
  constexpr bool contains(Value v) const { return bits_ & (1u << std::uint8_t(v)); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return ((bits_ >> 0) & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1); }
  constexpr std::uint8_t raw() const { return bits_; }
  // Only meaningful when size() == 1.
  Value single() const;
  std::vector<Value> values() const;
  friend constexpr bool operator==(ValueSet a, ValueSet b) { return a.bits_ == b.bits_; }

 private:
  std::uint8_t bits_ = 0;
};

std::string to_string(ValueSet s);

// Namespacing key for one protocol instance: (instance id, round).
struct InstanceKey {
  std::uint64_t instance = 0;
  std::uint64_t round = 0;
  friend constexpr bool operator==(const InstanceKey&, const InstanceKey&) = default;
};

}  // namespace sqba
