#include "uspkit/stereotype.hpp"

#include <algorithm>
#include <vector>

namespace uspkit {

std::string_view name_of(Stereotype s) { return kStereotypes[static_cast<std::size_t>(s)].name; }

ElementKind element_kind(Stereotype s) { return kStereotypes[static_cast<std::size_t>(s)].kind; }

std::string_view name_of(ElementKind k) {
    switch (k) {
        case ElementKind::Class: return "class";
        case ElementKind::Attribute: return "attribute";
        case ElementKind::Operation: return "operation";
        case ElementKind::Association: return "association";
    }
    return "?";
}

UnknownStereotype::UnknownStereotype(std::string name, std::string suggestion)
    : std::runtime_error("unknown stereotype '" + name + "' (did you mean '" + suggestion + "'?)"),
      name_(std::move(name)),
      suggestion_(std::move(suggestion)) {}

std::optional<Stereotype> find_stereotype(std::string_view name) {
    for (const auto& info : kStereotypes) {
        if (info.name == name) return info.value;
    }
    return std::nullopt;
}

Stereotype stereotype_of(std::string_view name) {
    if (auto s = find_stereotype(name)) return *s;
    throw UnknownStereotype(std::string(name), std::string(nearest_stereotype(name)));
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
            diag = up;
        }
    }
    return row[b.size()];
}

std::string_view nearest_stereotype(std::string_view name) {
    std::string_view best = kStereotypes.front().name;
    std::size_t best_dist = edit_distance(name, best);
    for (const auto& info : kStereotypes) {
        const std::size_t d = edit_distance(name, info.name);
        if (d < best_dist) {
            best = info.name;
            best_dist = d;
        }
    }
    return best;
}

}  // namespace uspkit
