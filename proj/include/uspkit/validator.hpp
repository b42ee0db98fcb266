#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "uspkit/ast.hpp"
#include "uspkit/diagnostic.hpp"
#include "uspkit/ir.hpp"

namespace uspkit {

/// A model that passed every profile rule, together with its typed program.
/// Only validate() can create one.
class ValidatedModel {
public:
    const ast::Model& model() const { return *model_; }
    const ir::Program& program() const { return *program_; }

    const ast::ClassDef& boundary() const;

private:
    friend struct ValidatorAccess;
    ValidatedModel(std::shared_ptr<const ast::Model> m, std::shared_ptr<const ir::Program> p)
        : model_(std::move(m)), program_(std::move(p)) {}

    std::shared_ptr<const ast::Model> model_;
    std::shared_ptr<const ir::Program> program_;
};

struct ValidationResult {
    std::optional<ValidatedModel> model;  // set iff no error diagnostics
    std::vector<Diagnostic> diagnostics;  // sorted; may hold warnings on success

    bool ok() const { return model.has_value(); }
};

/// Applies profile rules SP001-SP013 (errors) and SP101 (warning).
///
///   SP001 exactly one «boundary» class
///   SP002 the boundary class has exactly one «Exist» operation
///   SP003 frame classes carry a concept tag
///   SP004 «link» classes carry no concept tag
///   SP005 «whole» classes have exactly one «parts» attribute (inherited counts)
///   SP006 «atom» classes have no «parts» attribute
///   SP007 «part» classes have at least one «in» and one «out» attribute
///   SP008 «Exist» operations take no parameters and return nothing
///   SP009 «ref» attributes have nullable entity-reference type
///   SP010 no `new` of an abstract class; the boundary class is concrete
///   SP011 declarations and operation bodies are well-typed
///   SP012 no inheritance cycles; frames extend frames, links extend links
///   SP013 stereotypes match their element kind; channel ends are frames
///   SP101 two frames share a concept (warning)
ValidationResult validate(const ast::Model& m);

}  // namespace uspkit
