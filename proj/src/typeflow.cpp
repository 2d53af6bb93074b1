#include "flexgc/typeflow.hpp"

#include <deque>

#include <json.hpp>

namespace flexgc {

Location Location::local(MethodId m, std::string name) {
  Location l;
  l.kind = Kind::Local;
  l.owner = m;
  l.name = std::move(name);
  return l;
}

Location Location::global(std::string name) {
  Location l;
  l.kind = Kind::Global;
  l.name = std::move(name);
  return l;
}

Location Location::field(ClassId cls, std::string name) {
  Location l;
  l.kind = Kind::Field;
  l.owner = cls;
  l.name = std::move(name);
  return l;
}

Location Location::param(MethodId m, int index) {
  Location l;
  l.kind = Kind::Param;
  l.owner = m;
  l.index = index;
  return l;
}

Location Location::ret(MethodId m) {
  Location l;
  l.kind = Kind::Return;
  l.owner = m;
  return l;
}

Location Location::array_content(SiteId site) {
  Location l;
  l.kind = Kind::ArrayContent;
  l.owner = site;
  return l;
}

std::string Location::describe(const ProgramIndex& p) const {
  auto method_name = [&](MethodId m) {
    const MethodRef& mr = p.method(m);
    return p.klass(mr.class_id).name + "." + mr.name;
  };
  switch (kind) {
    case Kind::Local:
      return "local " + method_name(owner) + "." + name;
    case Kind::Global:
      return "global " + name;
    case Kind::Field:
      return "field " + p.klass(owner).name + "." + name;
    case Kind::Param:
      return "param " + method_name(owner) + "#" + std::to_string(index);
    case Kind::Return:
      return "return " + method_name(owner);
    case Kind::ArrayContent:
      return "array_content site " + std::to_string(owner);
  }
  return "?";
}

const TypeSet& FlowResult::at(const Location& loc) const {
  static const TypeSet empty;
  auto it = sets.find(loc);
  return it == sets.end() ? empty : it->second;
}

std::string member_to_string(const ProgramIndex& p, Member m) {
  if (member_is_null(m)) return "NULL";
  if (member_is_class(m)) return p.klass(member_class_id(m)).name;
  return "site:" + std::to_string(member_site_id(m));
}

DispatchResult dispatch_targets(const ProgramIndex& p, const TypeSet& receiver,
                                const std::string& method, bool strict) {
  DispatchResult result;
  for (Member m : receiver.members()) {
    if (member_is_null(m)) {
      result.null_receiver = true;
      continue;
    }
    if (member_is_site(m)) continue;  // arrays have no methods
    ClassId cls = member_class_id(m);
    auto target = p.resolve_method(cls, method);
    if (!target) {
      if (strict) {
        throw ValidateError("class '" + p.klass(cls).name +
                            "' does not resolve method '" + method + "'");
      }
      continue;
    }
    result.targets.insert(*target);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Fixpoint solver

namespace {

// A unit of transfer work: one statement of a reachable method, or the
// method's return rule (stmt == -1).
struct WorkItem {
  MethodId method = -1;
  int stmt = -1;

  friend bool operator<(const WorkItem& a, const WorkItem& b) {
    return std::tie(a.method, a.stmt) < std::tie(b.method, b.stmt);
  }
  friend bool operator==(const WorkItem& a, const WorkItem& b) {
    return a.method == b.method && a.stmt == b.stmt;
  }
};

class Solver {
 public:
  Solver(const ProgramIndex& p, AnalysisOptions opts) : p_(p), opts_(opts) {}

  FlowResult run() {
    reach(p_.entry());
    while (!queue_.empty()) {
      WorkItem item;
      if (opts_.order == AnalysisOptions::Order::Fifo) {
        item = queue_.front();
        queue_.pop_front();
      } else {
        item = queue_.back();
        queue_.pop_back();
      }
      queued_.erase(item);
      evaluate(item);
    }

    FlowResult result;
    for (const auto& [loc, id] : loc_ids_) result.sets[loc] = sets_[id];
    result.reachable_methods = reachable_;
    result.null_dereference_sites = null_sites_;
    return result;
  }

 private:
  using LocId = int32_t;

  LocId loc_id(const Location& loc) {
    auto it = loc_ids_.find(loc);
    if (it != loc_ids_.end()) return it->second;
    LocId id = static_cast<LocId>(sets_.size());
    loc_ids_.emplace(loc, id);
    sets_.emplace_back();
    subscribers_.emplace_back();
    // Standing saturation rules seed every array content set with null the
    // moment it exists.
    if (loc.kind == Location::Kind::ArrayContent &&
        opts_.saturation != AnalysisOptions::Saturation::None) {
      sets_[id].insert(kNullMember);
    }
    return id;
  }

  // Reading a location subscribes the active work item to future growth.
  const TypeSet& read(const Location& loc) {
    LocId id = loc_id(loc);
    subscribers_[id].insert(current_);
    return sets_[id];
  }

  void join_member(const Location& loc, Member m) {
    LocId id = loc_id(loc);
    bool changed = sets_[id].insert(m);
    if (loc.kind == Location::Kind::ArrayContent) changed |= close_content(id);
    if (changed) notify(id);
  }

  void join_set(const Location& loc, const TypeSet& ts) {
    LocId id = loc_id(loc);
    bool changed = sets_[id].merge(ts);
    if (loc.kind == Location::Kind::ArrayContent) changed |= close_content(id);
    if (changed) notify(id);
  }

  // Subtype saturation: content sets absorb every declared descendant of
  // their class members, plus null.
  bool close_content(LocId id) {
    if (opts_.saturation != AnalysisOptions::Saturation::Subtypes) return false;
    bool changed = false;
    std::vector<Member> classes;
    for (Member m : sets_[id].members()) {
      if (member_is_class(m)) classes.push_back(m);
    }
    for (Member m : classes) {
      for (ClassId sub : p_.descendants(member_class_id(m))) {
        changed |= sets_[id].insert(class_member(sub));
      }
    }
    changed |= sets_[id].insert(kNullMember);
    return changed;
  }

  void notify(LocId id) {
    for (const WorkItem& item : subscribers_[id]) enqueue(item);
  }

  void enqueue(const WorkItem& item) {
    if (queued_.insert(item).second) queue_.push_back(item);
  }

  void reach(MethodId m) {
    if (!reachable_.insert(m).second) return;
    const Method& method = *p_.method(m).method;
    for (int i = 0; i < static_cast<int>(method.body.size()); ++i) {
      enqueue(WorkItem{m, i});
    }
    if (method.return_expr) enqueue(WorkItem{m, -1});
  }

  TypeSet eval(MethodId m, const Expr& e) {
    TypeSet out;
    switch (e.kind) {
      case Expr::Kind::NewObject: {
        ClassId cls = *p_.class_id(e.name);
        out.insert(class_member(cls));
        // Allocation writes null into every field of the new object; those
        // are reachable assignments like any other.
        seed_fields(cls);
        break;
      }
      case Expr::Kind::NullLit:
        out.insert(kNullMember);
        break;
      case Expr::Kind::LocalRead:
        out.merge(read(Location::local(m, e.name)));
        break;
      case Expr::Kind::GlobalRead:
        out.merge(read(Location::global(e.name)));
        break;
      case Expr::Kind::ParamRead:
        out.merge(read(Location::param(m, e.param_index)));
        break;
      case Expr::Kind::FieldRead: {
        TypeSet objects = eval(m, *e.object);
        for (Member om : objects.members()) {
          if (!member_is_class(om)) continue;
          auto declaring = p_.resolve_field(member_class_id(om), e.name);
          if (!declaring) continue;
          out.merge(read(Location::field(*declaring, e.name)));
        }
        break;
      }
      case Expr::Kind::ArrayRead: {
        TypeSet arrays = place_read(m, *e.from);
        for (Member am : arrays.members()) {
          if (!member_is_site(am)) continue;
          out.merge(read(Location::array_content(member_site_id(am))));
        }
        break;
      }
    }
    return out;
  }

  void seed_fields(ClassId cls) {
    for (std::optional<ClassId> c = cls; c; c = p_.parent(*c)) {
      for (const std::string& f : p_.klass(*c).fields) {
        join_member(Location::field(*c, f), kNullMember);
      }
    }
  }

  // The set held by a place; for field places, the union over the receiver
  // set's classes.
  TypeSet place_read(MethodId m, const Place& place) {
    TypeSet out;
    for (const Location& loc : place_locations(m, place)) out.merge(read(loc));
    return out;
  }

  std::vector<Location> place_locations(MethodId m, const Place& place) {
    switch (place.kind) {
      case Place::Kind::Local:
        return {Location::local(m, place.name)};
      case Place::Kind::Global:
        return {Location::global(place.name)};
      case Place::Kind::Param:
        return {Location::param(m, place.param_index)};
      case Place::Kind::Field: {
        std::vector<Location> out;
        TypeSet objects = eval(m, *place.object);
        for (Member om : objects.members()) {
          if (!member_is_class(om)) continue;
          auto declaring = p_.resolve_field(member_class_id(om), place.name);
          if (declaring) out.push_back(Location::field(*declaring, place.name));
        }
        return out;
      }
    }
    return {};
  }

  void evaluate(const WorkItem& item) {
    current_ = item;
    MethodId m = item.method;
    const Method& method = *p_.method(m).method;

    if (item.stmt < 0) {
      join_set(Location::ret(m), eval(m, *method.return_expr));
      return;
    }

    const Stmt& stmt = method.body[static_cast<size_t>(item.stmt)];
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, AssignLocal>) {
            join_set(Location::local(m, node.name), eval(m, node.value));
          } else if constexpr (std::is_same_v<T, AssignGlobal>) {
            join_set(Location::global(node.name), eval(m, node.value));
          } else if constexpr (std::is_same_v<T, AssignField>) {
            TypeSet objects = eval(m, node.object);
            TypeSet value = eval(m, node.value);
            for (Member om : objects.members()) {
              if (!member_is_class(om)) continue;
              auto declaring =
                  p_.resolve_field(member_class_id(om), node.field);
              if (declaring) {
                join_set(Location::field(*declaring, node.field), value);
              }
            }
          } else if constexpr (std::is_same_v<T, ArrayCreate>) {
            for (const Location& loc : place_locations(m, node.into)) {
              join_member(loc, site_member(node.site));
            }
            Location content = Location::array_content(node.site);
            loc_id(content);  // materialize even if never written
            if (node.kind == ArrayKind::Calloc || node.kind == ArrayKind::Zeroed) {
              join_member(content, kNullMember);
            }
          } else if constexpr (std::is_same_v<T, ArrayExtend> ||
                               std::is_same_v<T, ArrayPrepend> ||
                               std::is_same_v<T, ArrayWrite>) {
            // Array smashing: one content set per site, joined through every
            // site the target place may hold.
            TypeSet arrays = place_read(m, node.target);
            TypeSet value = eval(m, node.value);
            for (Member am : arrays.members()) {
              if (!member_is_site(am)) continue;
              join_set(Location::array_content(member_site_id(am)), value);
            }
          } else if constexpr (std::is_same_v<T, ArrayRemoveLast>) {
            (void)node;  // contributes nothing
          } else if constexpr (std::is_same_v<T, Call>) {
            TypeSet receiver = eval(m, node.receiver);
            if (receiver.contains_null()) null_sites_.insert(stmt.uid);
            DispatchResult targets =
                dispatch_targets(p_, receiver, node.method, /*strict=*/false);
            std::vector<TypeSet> arg_sets;
            arg_sets.reserve(node.args.size());
            for (const Expr& a : node.args) arg_sets.push_back(eval(m, a));
            for (MethodId target : targets.targets) {
              reach(target);
              const Method& tm = *p_.method(target).method;
              size_t n = std::min(arg_sets.size(), tm.params.size());
              for (size_t i = 0; i < n; ++i) {
                join_set(Location::param(target, static_cast<int>(i)),
                         arg_sets[i]);
              }
              if (node.result_local) {
                join_set(Location::local(m, *node.result_local),
                         read(Location::ret(target)));
              }
            }
          } else if constexpr (std::is_same_v<T, Return>) {
            (void)node;  // the return rule handles the value
          }
        },
        stmt.node);
  }

  const ProgramIndex& p_;
  AnalysisOptions opts_;
  std::map<Location, LocId> loc_ids_;
  std::vector<TypeSet> sets_;
  std::vector<std::set<WorkItem>> subscribers_;
  std::deque<WorkItem> queue_;
  std::set<WorkItem> queued_;
  std::set<MethodId> reachable_;
  std::set<int> null_sites_;
  WorkItem current_;
};

}  // namespace

FlowResult compute_type_sets(const ProgramIndex& p, AnalysisOptions opts) {
  return Solver(p, opts).run();
}

std::set<MethodId> compute_reachable(const ProgramIndex& p) {
  return compute_type_sets(p).reachable_methods;
}

FlowResult saturate_null(const ProgramIndex& p) {
  AnalysisOptions opts;
  opts.saturation = AnalysisOptions::Saturation::Null;
  return compute_type_sets(p, opts);
}

FlowResult saturate_subtypes(const ProgramIndex& p) {
  AnalysisOptions opts;
  opts.saturation = AnalysisOptions::Saturation::Subtypes;
  return compute_type_sets(p, opts);
}

std::string flow_result_to_json(const ProgramIndex& p, const FlowResult& r) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json locations = nlohmann::ordered_json::array();
  for (const auto& [loc, set] : r.sets) {
    nlohmann::ordered_json entry;
    entry["location"] = loc.describe(p);
    std::vector<std::string> members;
    members.reserve(set.size());
    for (Member m : set.members()) members.push_back(member_to_string(p, m));
    entry["types"] = members;
    locations.push_back(std::move(entry));
  }
  doc["locations"] = std::move(locations);

  std::vector<std::string> reachable;
  for (MethodId m : r.reachable_methods) {
    const MethodRef& mr = p.method(m);
    reachable.push_back(p.klass(mr.class_id).name + "." + mr.name);
  }
  doc["reachable_methods"] = reachable;
  doc["null_dereference_sites"] =
      std::vector<int>(r.null_dereference_sites.begin(),
                       r.null_dereference_sites.end());
  return doc.dump(2) + "\n";
}

}  // namespace flexgc
