#include "flexgc/ir.hpp"

#include <algorithm>
#include <functional>

namespace flexgc {

const char* array_kind_name(ArrayKind kind) {
  switch (kind) {
    case ArrayKind::Fast: return "fast";
    case ArrayKind::Indexed: return "indexed";
    case ArrayKind::Ring: return "ring";
    case ArrayKind::Calloc: return "calloc";
    case ArrayKind::Zeroed: return "zeroed";
  }
  return "?";
}

std::optional<ArrayKind> array_kind_from_name(const std::string& name) {
  if (name == "fast") return ArrayKind::Fast;
  if (name == "indexed") return ArrayKind::Indexed;
  if (name == "ring") return ArrayKind::Ring;
  if (name == "calloc") return ArrayKind::Calloc;
  if (name == "zeroed") return ArrayKind::Zeroed;
  return std::nullopt;
}

int array_kind_arity(ArrayKind kind) {
  switch (kind) {
    case ArrayKind::Indexed:
    case ArrayKind::Ring:
      return 2;
    default:
      return 1;
  }
}

Expr new_object(std::string class_name, SiteId site) {
  Expr e;
  e.kind = Expr::Kind::NewObject;
  e.name = std::move(class_name);
  e.site = site;
  return e;
}

Expr null_lit() { return Expr{}; }

Expr local_read(std::string name) {
  Expr e;
  e.kind = Expr::Kind::LocalRead;
  e.name = std::move(name);
  return e;
}

Expr global_read(std::string name) {
  Expr e;
  e.kind = Expr::Kind::GlobalRead;
  e.name = std::move(name);
  return e;
}

Expr field_read(Expr object, std::string field) {
  Expr e;
  e.kind = Expr::Kind::FieldRead;
  e.object = std::make_shared<Expr>(std::move(object));
  e.name = std::move(field);
  return e;
}

Expr param_read(int index) {
  Expr e;
  e.kind = Expr::Kind::ParamRead;
  e.param_index = index;
  return e;
}

Expr array_read(Place from, int index) {
  Expr e;
  e.kind = Expr::Kind::ArrayRead;
  e.from = std::move(from);
  e.index = index;
  return e;
}

void assign_stmt_uids(Program& program) {
  int next = 0;
  for (auto& cls : program.classes)
    for (auto& m : cls.methods)
      for (auto& s : m.body) s.uid = next++;
}

// ---------------------------------------------------------------------------
// Validation / index construction

namespace {

void fail(const std::string& path, const std::string& what) {
  throw ValidateError(path + ": " + what);
}

}  // namespace

ProgramIndex::ProgramIndex(const Program& program) : program_(&program) {
  validate_and_build();
}

std::optional<ClassId> ProgramIndex::class_id(const std::string& name) const {
  auto it = class_ids_.find(name);
  if (it == class_ids_.end()) return std::nullopt;
  return it->second;
}

const ClassDecl& ProgramIndex::klass(ClassId id) const {
  return program_->classes.at(static_cast<size_t>(id));
}

std::optional<ClassId> ProgramIndex::parent(ClassId id) const {
  const auto& parent_name = klass(id).parent;
  if (!parent_name) return std::nullopt;
  return class_ids_.at(*parent_name);
}

bool ProgramIndex::derives_from(ClassId sub, ClassId ancestor) const {
  for (std::optional<ClassId> c = sub; c; c = parent(*c)) {
    if (*c == ancestor) return true;
  }
  return false;
}

const std::vector<ClassId>& ProgramIndex::descendants(ClassId id) const {
  return descendants_.at(static_cast<size_t>(id));
}

std::optional<MethodId> ProgramIndex::resolve_method(
    ClassId cls, const std::string& name) const {
  for (std::optional<ClassId> c = cls; c; c = parent(*c)) {
    auto it = method_by_name_.find({*c, name});
    if (it != method_by_name_.end()) return it->second;
  }
  return std::nullopt;
}

std::optional<ClassId> ProgramIndex::resolve_field(
    ClassId cls, const std::string& name) const {
  for (std::optional<ClassId> c = cls; c; c = parent(*c)) {
    const auto& fields = klass(*c).fields;
    if (std::find(fields.begin(), fields.end(), name) != fields.end()) return *c;
  }
  return std::nullopt;
}

bool ProgramIndex::any_class_defines_method(const std::string& name) const {
  return method_names_.count(name) > 0;
}

bool ProgramIndex::any_class_declares_field(const std::string& name) const {
  return field_names_.count(name) > 0;
}

void ProgramIndex::validate_and_build() {
  const Program& p = *program_;

  // Classes: unique names, resolvable parents, acyclic hierarchy.
  for (size_t i = 0; i < p.classes.size(); ++i) {
    const auto& cls = p.classes[i];
    std::string path = "classes[" + std::to_string(i) + "]";
    if (cls.name.empty()) fail(path, "class name is empty");
    if (!class_ids_.emplace(cls.name, static_cast<ClassId>(i)).second) {
      fail(path, "duplicate class name '" + cls.name + "'");
    }
  }
  for (size_t i = 0; i < p.classes.size(); ++i) {
    const auto& cls = p.classes[i];
    std::string path = "classes[" + std::to_string(i) + "]";
    if (cls.parent && !class_ids_.count(*cls.parent)) {
      fail(path, "unknown parent class '" + *cls.parent + "'");
    }
  }
  for (size_t i = 0; i < p.classes.size(); ++i) {
    std::set<ClassId> seen;
    std::optional<ClassId> c = static_cast<ClassId>(i);
    while (c) {
      if (!seen.insert(*c).second) {
        fail("classes[" + std::to_string(i) + "]", "hierarchy cycle through '" +
                 p.classes[i].name + "'");
      }
      c = parent(*c);
    }
  }

  descendants_.assign(p.classes.size(), {});
  for (ClassId sub = 0; sub < class_count(); ++sub) {
    for (std::optional<ClassId> c = parent(sub); c; c = parent(*c)) {
      descendants_[static_cast<size_t>(*c)].push_back(sub);
    }
  }

  // Globals.
  for (size_t i = 0; i < p.globals.size(); ++i) {
    if (!globals_.insert(p.globals[i]).second) {
      fail("globals[" + std::to_string(i) + "]",
           "duplicate global '" + p.globals[i] + "'");
    }
  }

  // Fields: unique per class, no shadowing of inherited names.
  for (size_t i = 0; i < p.classes.size(); ++i) {
    const auto& cls = p.classes[i];
    std::string path = "classes[" + std::to_string(i) + "]";
    std::set<std::string> own;
    for (const auto& f : cls.fields) {
      if (!own.insert(f).second) fail(path, "duplicate field '" + f + "'");
      field_names_.insert(f);
    }
    if (cls.parent) {
      ClassId anc = class_ids_.at(*cls.parent);
      for (const auto& f : cls.fields) {
        if (resolve_field(anc, f)) {
          fail(path, "field '" + f + "' shadows an inherited field");
        }
      }
    }
  }

  // Method table; overrides must keep the arity.
  for (size_t i = 0; i < p.classes.size(); ++i) {
    const auto& cls = p.classes[i];
    for (size_t j = 0; j < cls.methods.size(); ++j) {
      const auto& m = cls.methods[j];
      std::string path =
          "classes[" + std::to_string(i) + "].methods[" + std::to_string(j) + "]";
      if (m.name.empty()) fail(path, "method name is empty");
      MethodId id = static_cast<MethodId>(methods_.size());
      if (!method_by_name_.emplace(std::make_pair(static_cast<ClassId>(i), m.name), id)
               .second) {
        fail(path, "duplicate method '" + m.name + "' in class '" + cls.name + "'");
      }
      methods_.push_back(MethodRef{static_cast<ClassId>(i), m.name, &m});
      method_names_.insert(m.name);

      std::set<std::string> names;
      for (const auto& n : m.params) {
        if (!names.insert(n).second) fail(path, "duplicate parameter '" + n + "'");
      }
      for (const auto& n : m.locals) {
        if (!names.insert(n).second) {
          fail(path, "local '" + n + "' collides with another name in scope");
        }
      }
    }
  }
  for (size_t i = 0; i < p.classes.size(); ++i) {
    const auto& cls = p.classes[i];
    if (!cls.parent) continue;
    ClassId anc = class_ids_.at(*cls.parent);
    for (const auto& m : cls.methods) {
      if (auto overridden = resolve_method(anc, m.name)) {
        const Method& base = *methods_[static_cast<size_t>(*overridden)].method;
        if (base.params.size() != m.params.size()) {
          fail("classes[" + std::to_string(i) + "]",
               "override of '" + m.name + "' changes arity");
        }
      }
    }
  }

  // Entry point.
  auto entry_cls = class_id(p.entry_class);
  if (!entry_cls) fail("entry", "unknown class '" + p.entry_class + "'");
  auto entry = resolve_method(*entry_cls, p.entry_method);
  if (!entry) {
    fail("entry", "class '" + p.entry_class + "' has no method '" +
             p.entry_method + "'");
  }
  if (!methods_[static_cast<size_t>(*entry)].method->params.empty()) {
    fail("entry", "entry method must take no parameters");
  }
  entry_ = *entry;

  // Statement walk: name resolution, site uniqueness, uid sanity.
  std::set<int> uids;
  for (size_t ci = 0; ci < p.classes.size(); ++ci) {
    const auto& cls = p.classes[ci];
    for (size_t mi = 0; mi < cls.methods.size(); ++mi) {
      const Method& m = cls.methods[mi];
      std::string mpath =
          "classes[" + std::to_string(ci) + "].methods[" + std::to_string(mi) + "]";

      auto has_local = [&](const std::string& n) {
        return std::find(m.locals.begin(), m.locals.end(), n) != m.locals.end();
      };

      std::function<void(const Expr&, const std::string&)> check_expr;
      std::function<void(const Place&, const std::string&)> check_place;

      check_expr = [&](const Expr& e, const std::string& path) {
        switch (e.kind) {
          case Expr::Kind::NewObject:
            if (!class_ids_.count(e.name)) {
              fail(path, "unknown class '" + e.name + "'");
            }
            break;
          case Expr::Kind::NullLit:
            break;
          case Expr::Kind::LocalRead:
            if (!has_local(e.name)) fail(path, "unknown local '" + e.name + "'");
            break;
          case Expr::Kind::GlobalRead:
            if (!globals_.count(e.name)) {
              fail(path, "unknown global '" + e.name + "'");
            }
            break;
          case Expr::Kind::FieldRead:
            check_expr(*e.object, path + ".object");
            if (!field_names_.count(e.name)) {
              fail(path, "no class declares field '" + e.name + "'");
            }
            break;
          case Expr::Kind::ParamRead:
            if (e.param_index < 0 ||
                e.param_index >= static_cast<int>(m.params.size())) {
              fail(path, "parameter index " + std::to_string(e.param_index) +
                       " out of range");
            }
            break;
          case Expr::Kind::ArrayRead:
            check_place(*e.from, path + ".from");
            break;
        }
      };

      check_place = [&](const Place& pl, const std::string& path) {
        switch (pl.kind) {
          case Place::Kind::Local:
            if (!has_local(pl.name)) fail(path, "unknown local '" + pl.name + "'");
            break;
          case Place::Kind::Global:
            if (!globals_.count(pl.name)) {
              fail(path, "unknown global '" + pl.name + "'");
            }
            break;
          case Place::Kind::Param:
            if (pl.param_index < 0 ||
                pl.param_index >= static_cast<int>(m.params.size())) {
              fail(path, "parameter index " + std::to_string(pl.param_index) +
                       " out of range");
            }
            break;
          case Place::Kind::Field:
            check_expr(*pl.object, path + ".object");
            if (!field_names_.count(pl.name)) {
              fail(path, "no class declares field '" + pl.name + "'");
            }
            break;
        }
      };

      for (size_t si = 0; si < m.body.size(); ++si) {
        const Stmt& s = m.body[si];
        std::string path = mpath + ".body[" + std::to_string(si) + "]";
        if (s.uid < 0 || !uids.insert(s.uid).second) {
          fail(path, "missing or duplicate statement uid");
        }
        std::visit(
            [&](const auto& node) {
              using T = std::decay_t<decltype(node)>;
              if constexpr (std::is_same_v<T, AssignLocal>) {
                if (!has_local(node.name)) {
                  fail(path, "unknown local '" + node.name + "'");
                }
                check_expr(node.value, path + ".value");
              } else if constexpr (std::is_same_v<T, AssignGlobal>) {
                if (!globals_.count(node.name)) {
                  fail(path, "unknown global '" + node.name + "'");
                }
                check_expr(node.value, path + ".value");
              } else if constexpr (std::is_same_v<T, AssignField>) {
                check_expr(node.object, path + ".object");
                if (!field_names_.count(node.field)) {
                  fail(path, "no class declares field '" + node.field + "'");
                }
                check_expr(node.value, path + ".value");
              } else if constexpr (std::is_same_v<T, ArrayCreate>) {
                check_place(node.into, path + ".into");
                if (node.site < 0) fail(path, "allocation site must be >= 0");
                if (!site_kinds_.emplace(node.site, node.kind).second) {
                  fail(path, "duplicate allocation site " + std::to_string(node.site));
                }
                sites_.push_back(node.site);
                if (static_cast<int>(node.args.size()) != array_kind_arity(node.kind)) {
                  fail(path, std::string("'") + array_kind_name(node.kind) +
                           "' takes " + std::to_string(array_kind_arity(node.kind)) +
                           " argument(s)");
                }
              } else if constexpr (std::is_same_v<T, ArrayExtend> ||
                                   std::is_same_v<T, ArrayPrepend> ||
                                   std::is_same_v<T, ArrayRemoveLast>) {
                check_place(node.target, path + ".target");
                if constexpr (!std::is_same_v<T, ArrayRemoveLast>) {
                  check_expr(node.value, path + ".value");
                }
              } else if constexpr (std::is_same_v<T, ArrayWrite>) {
                check_place(node.target, path + ".target");
                check_expr(node.value, path + ".value");
              } else if constexpr (std::is_same_v<T, Call>) {
                check_expr(node.receiver, path + ".receiver");
                if (!method_names_.count(node.method)) {
                  fail(path, "no class defines method '" + node.method + "'");
                }
                for (size_t ai = 0; ai < node.args.size(); ++ai) {
                  check_expr(node.args[ai],
                                  path + ".args[" + std::to_string(ai) + "]");
                }
                if (node.result_local && !has_local(*node.result_local)) {
                  fail(path, "unknown result local '" + *node.result_local + "'");
                }
              } else if constexpr (std::is_same_v<T, Return>) {
                (void)node;
              }
            },
            s.node);
      }
      if (m.return_expr) {
        check_expr(*m.return_expr, mpath + ".return");
      }
    }
  }
}

}  // namespace flexgc
