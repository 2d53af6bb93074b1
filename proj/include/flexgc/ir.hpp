// Minimal class-based program representation: classes with single
// inheritance, methods with straight-line bodies, globals, and the array
// operations. Serves as the common subject for the interpreter and for the
// type flow analysis.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "flexgc/cell.hpp"

namespace flexgc {

enum class ArrayKind : uint8_t { Fast, Indexed, Ring, Calloc, Zeroed };

const char* array_kind_name(ArrayKind kind);
std::optional<ArrayKind> array_kind_from_name(const std::string& name);
// Number of creation arguments: fast/calloc/zeroed take one, indexed/ring
// take capacity and lower bound.
int array_kind_arity(ArrayKind kind);

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

// A storage location that can hold an array (or any value): the target of
// array operations and the source of array reads.
struct Place {
  enum class Kind : uint8_t { Local, Global, Param, Field };
  Kind kind = Kind::Local;
  std::string name;    // local / global / field name
  int param_index = 0;
  ExprP object;        // field receiver
};

struct Expr {
  enum class Kind : uint8_t {
    NewObject,  // name = class, site = allocation site
    NullLit,
    LocalRead,   // name
    GlobalRead,  // name
    FieldRead,   // object, name
    ParamRead,   // param_index
    ArrayRead,   // from, index
  };

  Kind kind = Kind::NullLit;
  std::string name;
  SiteId site = kNoSite;
  int param_index = 0;
  ExprP object;
  std::optional<Place> from;
  int index = 0;
};

Expr new_object(std::string class_name, SiteId site);
Expr null_lit();
Expr local_read(std::string name);
Expr global_read(std::string name);
Expr field_read(Expr object, std::string field);
Expr param_read(int index);
Expr array_read(Place from, int index);

struct AssignLocal {
  std::string name;
  Expr value;
};
struct AssignGlobal {
  std::string name;
  Expr value;
};
struct AssignField {
  Expr object;
  std::string field;
  Expr value;
};
struct ArrayCreate {
  Place into;
  ArrayKind kind = ArrayKind::Fast;
  SiteId site = kNoSite;
  std::vector<int64_t> args;  // [capacity] / [capacity, lower] / [size] / [length]
};
struct ArrayExtend {
  Place target;
  Expr value;
};
struct ArrayPrepend {
  Place target;
  Expr value;
};
struct ArrayWrite {
  Place target;
  int index = 0;
  Expr value;
};
struct ArrayRemoveLast {
  Place target;
};
struct Call {
  Expr receiver;
  std::string method;
  std::vector<Expr> args;
  std::optional<std::string> result_local;
};
struct Return {};

using StmtNode = std::variant<AssignLocal, AssignGlobal, AssignField,
                              ArrayCreate, ArrayExtend, ArrayPrepend,
                              ArrayWrite, ArrayRemoveLast, Call, Return>;

struct Stmt {
  // Stable identity, assigned in document order when the program is built.
  // Reordering a body moves statements together with their uids, so results
  // keyed by uid are comparable across permutations.
  int uid = -1;
  StmtNode node;
};

struct Method {
  std::string name;
  std::vector<std::string> params;
  std::vector<std::string> locals;
  std::vector<Stmt> body;
  std::optional<Expr> return_expr;
};

struct ClassDecl {
  std::string name;
  std::optional<std::string> parent;
  std::vector<std::string> fields;
  std::vector<Method> methods;
};

struct Program {
  std::vector<ClassDecl> classes;
  std::vector<std::string> globals;
  std::string entry_class;
  std::string entry_method;
};

// Validation failure; the message carries a document path such as
// "classes[2].methods[0].body[3]".
class ValidateError : public std::runtime_error {
 public:
  explicit ValidateError(const std::string& what) : std::runtime_error(what) {}
};

using ClassId = int32_t;
using MethodId = int32_t;

struct MethodRef {
  ClassId class_id = -1;
  std::string name;
  const Method* method = nullptr;
};

// Resolved view of a validated program: class ids in declaration order, a
// flat method table, hierarchy queries, field and method resolution, and
// the registry of array allocation sites. Construction performs full
// validation and throws ValidateError on the first problem.
class ProgramIndex {
 public:
  explicit ProgramIndex(const Program& program);

  const Program& program() const { return *program_; }

  int32_t class_count() const { return static_cast<int32_t>(class_ids_.size()); }
  std::optional<ClassId> class_id(const std::string& name) const;
  const ClassDecl& klass(ClassId id) const;
  std::optional<ClassId> parent(ClassId id) const;
  bool derives_from(ClassId sub, ClassId ancestor) const;
  // Strict descendants, in declaration order.
  const std::vector<ClassId>& descendants(ClassId id) const;

  int32_t method_count() const { return static_cast<int32_t>(methods_.size()); }
  const MethodRef& method(MethodId id) const { return methods_.at(static_cast<size_t>(id)); }
  // Nearest ancestor-or-self definition, the dynamic dispatch rule.
  std::optional<MethodId> resolve_method(ClassId cls, const std::string& name) const;
  // Class that declares the field, walking ancestor-or-self.
  std::optional<ClassId> resolve_field(ClassId cls, const std::string& name) const;
  bool any_class_defines_method(const std::string& name) const;
  bool any_class_declares_field(const std::string& name) const;

  MethodId entry() const { return entry_; }
  bool is_global(const std::string& name) const { return globals_.count(name) > 0; }

  const std::vector<SiteId>& sites() const { return sites_; }
  ArrayKind site_kind(SiteId site) const { return site_kinds_.at(site); }

 private:
  void validate_and_build();

  const Program* program_;
  std::map<std::string, ClassId> class_ids_;
  std::vector<std::vector<ClassId>> descendants_;
  std::vector<MethodRef> methods_;
  std::map<std::pair<ClassId, std::string>, MethodId> method_by_name_;
  std::set<std::string> method_names_;
  std::set<std::string> field_names_;
  std::set<std::string> globals_;
  MethodId entry_ = -1;
  std::vector<SiteId> sites_;
  std::map<SiteId, ArrayKind> site_kinds_;
};

// Assigns fresh uids to every statement in document order. Used by program
// builders; parsing does this automatically.
void assign_stmt_uids(Program& program);

}  // namespace flexgc
