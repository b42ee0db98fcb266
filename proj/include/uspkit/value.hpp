#pragma once

// Runtime values of the behaviour language.

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace uspkit {

struct NullValue {
    bool operator==(const NullValue&) const = default;
};

/// Index of an entity in creation order; doubles as the `#n` in its id.
struct EntityRef {
    std::uint32_t index = 0;
    bool operator==(const EntityRef&) const = default;
};

struct TextValue {
    std::shared_ptr<const std::string> text;

    const std::string& str() const { return *text; }
    friend bool operator==(const TextValue& a, const TextValue& b) { return *a.text == *b.text; }
};

/// Copy-on-write list of entity references. Copies share storage until one
/// side mutates, which makes foreach snapshots free.
class ListValue {
public:
    ListValue() : items_(std::make_shared<std::vector<EntityRef>>()) {}

    const std::vector<EntityRef>& items() const { return *items_; }
    std::vector<EntityRef>& mutable_items() {
        if (items_.use_count() > 1) items_ = std::make_shared<std::vector<EntityRef>>(*items_);
        return *items_;
    }

    friend bool operator==(const ListValue& a, const ListValue& b) { return *a.items_ == *b.items_; }

private:
    std::shared_ptr<std::vector<EntityRef>> items_;
};

using Value = std::variant<NullValue, std::int64_t, double, bool, TextValue, EntityRef, ListValue>;

inline Value make_text(std::string s) { return TextValue{std::make_shared<const std::string>(std::move(s))}; }

inline bool is_null(const Value& v) { return std::holds_alternative<NullValue>(v); }

}  // namespace uspkit
