#include "flexgc/interp.hpp"

namespace flexgc {

PlanTable plans_from_flow(const FlowResult& flow) {
  PlanTable plans;
  for (const auto& [loc, set] : flow.sets) {
    if (loc.kind == Location::Kind::ArrayContent) {
      plans.set_site_plan(loc.owner, derive_mark_plan(set));
    } else if (loc.kind == Location::Kind::Field) {
      plans.set_field_plan(loc.owner, loc.name, derive_mark_plan(set));
    }
  }
  return plans;
}

namespace {

constexpr int64_t kWordSize = 8;

// Keeps values reachable by the collector while an enclosing statement
// still needs them; unwinds on scope exit.
class TempRoots {
 public:
  explicit TempRoots(std::vector<CellValue>& temps)
      : temps_(temps), base_(temps.size()) {}
  ~TempRoots() { temps_.resize(base_); }
  void push(CellValue v) { temps_.push_back(v); }

 private:
  std::vector<CellValue>& temps_;
  size_t base_;
};

}  // namespace

Interpreter::Interpreter(const ProgramIndex& p, InterpOptions opts)
    : p_(p), opts_(opts), heap_(HeapConfig{opts.supply_fill, opts.gc_budget}) {
  if (opts_.plans != nullptr) {
    plans_ = *opts_.plans;
  } else {
    plans_ = plans_from_flow(compute_type_sets(p_));
  }
  heap_.set_trace_sink(opts_.trace_sink);
  // Program classes become heap classes with identical ids.
  for (ClassId c = 0; c < p_.class_count(); ++c) {
    const ClassDecl& cls = p_.klass(c);
    std::optional<TypeId> parent;
    if (cls.parent) parent = *p_.class_id(*cls.parent);
    heap_.declare_class(cls.name, parent, cls.fields);
  }
}

RunTrace interpret(const ProgramIndex& p, InterpOptions opts) {
  return Interpreter(p, opts).run();
}

RunTrace Interpreter::run() {
  trace_ = RunTrace{};
  try {
    run_method(p_.entry(), {});
    trace_.completed = true;
  } catch (const Fault& f) {
    trace_.fault = f.message;
  } catch (const BudgetExhausted&) {
    // partial trace, flagged via completed == false
  } catch (const ContractViolation& e) {
    trace_.fault = e.what();
  } catch (const PlanFault& e) {
    trace_.fault = e.what();
  }
  return trace_;
}

void Interpreter::step() {
  trace_.steps += 1;
  if (trace_.steps > opts_.step_budget) throw BudgetExhausted{};
}

std::vector<ObjRef> Interpreter::roots() const {
  std::vector<ObjRef> roots;
  auto add = [&](CellValue v) {
    if (v.is_ref()) roots.push_back(v.as_ref());
  };
  for (const auto& [name, v] : globals_) add(v);
  for (const Frame& f : frames_) {
    for (const CellValue& v : f.params) add(v);
    for (const auto& v : f.locals) {
      if (v) add(*v);
    }
  }
  for (const CellValue& v : temps_) add(v);
  return roots;
}

void Interpreter::maybe_collect() {
  if (heap_.live_count() < opts_.gc_budget) return;
  trace_.gc_cycles.push_back(heap_.collect(roots(), plans_));
}

std::optional<Member> Interpreter::value_member(CellValue v) const {
  if (v.is_null()) return kNullMember;
  if (v.is_ref()) return heap_.member_of(v.as_ref());
  return std::nullopt;  // scalars live outside the type sets
}

void Interpreter::observe(const Location& loc, CellValue v) {
  if (auto m = value_member(v)) trace_.observed[loc][*m] += 1;
}

void Interpreter::emit(const TraceEvent& ev) {
  if (opts_.trace_sink != nullptr) opts_.trace_sink->on_event(ev);
}

CellValue Interpreter::eval(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::NewObject: {
      maybe_collect();
      TypeId type = *p_.class_id(e.name);
      return CellValue::ref(heap_.alloc_object(type));
    }
    case Expr::Kind::NullLit:
      return CellValue::null();
    case Expr::Kind::LocalRead:
    case Expr::Kind::GlobalRead:
    case Expr::Kind::ParamRead: {
      Place place;
      place.kind = e.kind == Expr::Kind::LocalRead    ? Place::Kind::Local
                   : e.kind == Expr::Kind::GlobalRead ? Place::Kind::Global
                                                      : Place::Kind::Param;
      place.name = e.name;
      place.param_index = e.param_index;
      return read_place(place);
    }
    case Expr::Kind::FieldRead: {
      CellValue obj = eval(*e.object);
      if (obj.is_null()) throw Fault{"field read '" + e.name + "' on null"};
      if (!obj.is_ref() || heap_.kind(obj.as_ref()) != Heap::SlotKind::Object) {
        throw Fault{"field read '" + e.name + "' on a non-object value"};
      }
      const HeapObject& ho = heap_.object(obj.as_ref());
      auto declaring = p_.resolve_field(ho.type_id, e.name);
      if (!declaring) {
        throw Fault{"class '" + p_.klass(ho.type_id).name + "' has no field '" +
                    e.name + "'"};
      }
      const HeapClass& cls = heap_.klass(ho.type_id);
      for (size_t i = 0; i < cls.layout.size(); ++i) {
        if (cls.layout[i].name == e.name) return ho.fields[i];
      }
      throw Fault{"field layout mismatch for '" + e.name + "'"};
    }
    case Expr::Kind::ArrayRead: {
      ObjRef array = array_at(*e.from, "array_read");
      SiteId site = heap_.site_of(array);
      CellValue out;
      switch (heap_.kind(array)) {
        case Heap::SlotKind::Fast: {
          FastArray& fa = heap_.fast(array);
          out = fa.read(e.index);
          emit(TraceEvent::read(array.slot, e.index * kWordSize, kWordSize));
          break;
        }
        case Heap::SlotKind::Indexed: {
          IndexedArray& ia = heap_.indexed(array);
          out = ia.read(e.index);
          emit(TraceEvent::read(array.slot, (e.index - ia.lower()) * kWordSize,
                                kWordSize));
          break;
        }
        case Heap::SlotKind::Ring: {
          RingArray& ra = heap_.ring(array);
          out = ra.read(e.index);
          emit(TraceEvent::read(array.slot,
                                ra.physical_index(e.index) * kWordSize,
                                kWordSize));
          break;
        }
        case Heap::SlotKind::Zeroed: {
          ZeroedArray& za = heap_.zeroed(array);
          out = za.read(e.index);
          emit(TraceEvent::read(array.slot, e.index * kWordSize, kWordSize));
          break;
        }
        case Heap::SlotKind::Object:
          throw Fault{"array_read on an object"};
      }
      if (out.is_null()) trace_.null_read_sites.insert(site);
      return out;
    }
  }
  throw Fault{"unreachable expression kind"};
}

CellValue Interpreter::read_place(const Place& place) {
  switch (place.kind) {
    case Place::Kind::Local: {
      const Method& m = method_of(frame().method);
      for (size_t i = 0; i < m.locals.size(); ++i) {
        if (m.locals[i] == place.name) {
          const auto& slot = frame().locals[i];
          if (!slot) {
            throw Fault{"read of unbound local '" + place.name + "'"};
          }
          return *slot;
        }
      }
      throw Fault{"unknown local '" + place.name + "'"};
    }
    case Place::Kind::Global: {
      auto it = globals_.find(place.name);
      if (it == globals_.end()) {
        throw Fault{"read of unbound global '" + place.name + "'"};
      }
      return it->second;
    }
    case Place::Kind::Param:
      return frame().params.at(static_cast<size_t>(place.param_index));
    case Place::Kind::Field: {
      Expr read;
      read.kind = Expr::Kind::FieldRead;
      read.object = place.object;
      read.name = place.name;
      return eval(read);
    }
  }
  throw Fault{"unreachable place kind"};
}

void Interpreter::write_place(const Place& place, CellValue v) {
  switch (place.kind) {
    case Place::Kind::Local: {
      const Method& m = method_of(frame().method);
      for (size_t i = 0; i < m.locals.size(); ++i) {
        if (m.locals[i] == place.name) {
          frame().locals[i] = v;
          observe(Location::local(frame().method, place.name), v);
          return;
        }
      }
      throw Fault{"unknown local '" + place.name + "'"};
    }
    case Place::Kind::Global:
      globals_[place.name] = v;
      observe(Location::global(place.name), v);
      return;
    case Place::Kind::Param:
      frame().params.at(static_cast<size_t>(place.param_index)) = v;
      observe(Location::param(frame().method, place.param_index), v);
      return;
    case Place::Kind::Field: {
      TempRoots roots(temps_);
      roots.push(v);
      CellValue obj = eval(*place.object);
      if (obj.is_null()) throw Fault{"field write '" + place.name + "' on null"};
      if (!obj.is_ref() || heap_.kind(obj.as_ref()) != Heap::SlotKind::Object) {
        throw Fault{"field write '" + place.name + "' on a non-object value"};
      }
      HeapObject& ho = heap_.object(obj.as_ref());
      auto declaring = p_.resolve_field(ho.type_id, place.name);
      if (!declaring) {
        throw Fault{"class '" + p_.klass(ho.type_id).name + "' has no field '" +
                    place.name + "'"};
      }
      const HeapClass& cls = heap_.klass(ho.type_id);
      for (size_t i = 0; i < cls.layout.size(); ++i) {
        if (cls.layout[i].name == place.name) {
          ho.fields[i] = v;
          observe(Location::field(*declaring, place.name), v);
          return;
        }
      }
      throw Fault{"field layout mismatch for '" + place.name + "'"};
    }
  }
}

ObjRef Interpreter::array_at(const Place& place, const char* op) {
  CellValue v = read_place(place);
  if (v.is_null()) throw Fault{std::string(op) + " on null"};
  if (!v.is_ref() || heap_.kind(v.as_ref()) == Heap::SlotKind::Object) {
    throw Fault{std::string(op) + " on a non-array value"};
  }
  return v.as_ref();
}

ObjRef Interpreter::allocate_array(const ArrayCreate& node) {
  maybe_collect();
  const auto& a = node.args;
  switch (node.kind) {
    case ArrayKind::Fast: {
      ObjRef ref = heap_.alloc_fast(static_cast<int>(a[0]), node.site);
      emit(TraceEvent::alloc(ref.slot, a[0] * kWordSize, false));
      return ref;
    }
    case ArrayKind::Indexed: {
      ObjRef ref = heap_.alloc_indexed(static_cast<int>(a[0]),
                                       static_cast<int>(a[1]), node.site);
      emit(TraceEvent::alloc(ref.slot, a[0] * kWordSize, false));
      return ref;
    }
    case ArrayKind::Ring: {
      ObjRef ref = heap_.alloc_ring(static_cast<int>(a[0]),
                                    static_cast<int>(a[1]), node.site);
      emit(TraceEvent::alloc(ref.slot, a[0] * kWordSize, false));
      return ref;
    }
    case ArrayKind::Calloc: {
      ObjRef ref = heap_.alloc_calloc(static_cast<int>(a[0]), node.site);
      emit(TraceEvent::alloc(ref.slot, a[0] * kWordSize, true));
      observe(Location::array_content(node.site), CellValue::null());
      return ref;
    }
    case ArrayKind::Zeroed: {
      ObjRef ref = heap_.alloc_zeroed(static_cast<int>(a[0]), node.site);
      emit(TraceEvent::alloc(ref.slot, a[0] * kWordSize, true));
      observe(Location::array_content(node.site), CellValue::null());
      return ref;
    }
  }
  throw Fault{"unreachable array kind"};
}

void Interpreter::exec(const Stmt& stmt) {
  step();
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, AssignLocal>) {
          CellValue v = eval(node.value);
          Place place;
          place.kind = Place::Kind::Local;
          place.name = node.name;
          write_place(place, v);
        } else if constexpr (std::is_same_v<T, AssignGlobal>) {
          CellValue v = eval(node.value);
          Place place;
          place.kind = Place::Kind::Global;
          place.name = node.name;
          write_place(place, v);
        } else if constexpr (std::is_same_v<T, AssignField>) {
          Place place;
          place.kind = Place::Kind::Field;
          place.object = std::make_shared<Expr>(node.object);
          place.name = node.field;
          CellValue v = eval(node.value);
          write_place(place, v);
        } else if constexpr (std::is_same_v<T, ArrayCreate>) {
          ObjRef ref = allocate_array(node);
          TempRoots roots(temps_);
          roots.push(CellValue::ref(ref));
          write_place(node.into, CellValue::ref(ref));
        } else if constexpr (std::is_same_v<T, ArrayExtend>) {
          ObjRef array = array_at(node.target, "array_extend");
          TempRoots roots(temps_);
          roots.push(CellValue::ref(array));
          CellValue v = eval(node.value);
          SiteId site = heap_.site_of(array);
          auto vk = v.is_ref()    ? TraceEvent::ValueKind::HeapRef
                    : v.is_null() ? TraceEvent::ValueKind::Null
                                  : TraceEvent::ValueKind::Other;
          switch (heap_.kind(array)) {
            case Heap::SlotKind::Fast:
            case Heap::SlotKind::Indexed: {
              FastArray& fa = heap_.kind(array) == Heap::SlotKind::Fast
                                  ? heap_.fast(array)
                                  : heap_.indexed(array).base();
              int old_capacity = fa.capacity();
              int slot = fa.size();
              fa.extend(v);
              if (fa.capacity() != old_capacity) {
                emit(TraceEvent::realloc(array.slot,
                                         fa.capacity() * kWordSize));
              }
              emit(TraceEvent::write(array.slot, slot * kWordSize, kWordSize,
                                     vk));
              break;
            }
            case Heap::SlotKind::Ring: {
              RingArray& ra = heap_.ring(array);
              int old_capacity = ra.capacity();
              ra.extend(v);
              if (ra.capacity() != old_capacity) {
                emit(TraceEvent::realloc(array.slot,
                                         ra.capacity() * kWordSize));
              }
              emit(TraceEvent::write(array.slot,
                                     ra.physical_index(ra.upper()) * kWordSize,
                                     kWordSize, vk));
              break;
            }
            default:
              throw Fault{"array_extend on a fixed-length array"};
          }
          observe(Location::array_content(site), v);
        } else if constexpr (std::is_same_v<T, ArrayPrepend>) {
          ObjRef array = array_at(node.target, "array_prepend");
          TempRoots roots(temps_);
          roots.push(CellValue::ref(array));
          CellValue v = eval(node.value);
          if (heap_.kind(array) != Heap::SlotKind::Ring) {
            throw Fault{"array_prepend needs a ring array"};
          }
          RingArray& ra = heap_.ring(array);
          int old_capacity = ra.capacity();
          ra.prepend(v);
          if (ra.capacity() != old_capacity) {
            emit(TraceEvent::realloc(array.slot, ra.capacity() * kWordSize));
          }
          auto vk = v.is_ref()    ? TraceEvent::ValueKind::HeapRef
                    : v.is_null() ? TraceEvent::ValueKind::Null
                                  : TraceEvent::ValueKind::Other;
          emit(TraceEvent::write(array.slot,
                                 ra.physical_index(ra.lower()) * kWordSize,
                                 kWordSize, vk));
          observe(Location::array_content(heap_.site_of(array)), v);
        } else if constexpr (std::is_same_v<T, ArrayWrite>) {
          ObjRef array = array_at(node.target, "array_write");
          TempRoots roots(temps_);
          roots.push(CellValue::ref(array));
          CellValue v = eval(node.value);
          SiteId site = heap_.site_of(array);
          auto vk = v.is_ref()    ? TraceEvent::ValueKind::HeapRef
                    : v.is_null() ? TraceEvent::ValueKind::Null
                                  : TraceEvent::ValueKind::Other;
          int64_t offset = 0;
          switch (heap_.kind(array)) {
            case Heap::SlotKind::Fast:
              heap_.fast(array).write(node.index, v);
              offset = node.index * kWordSize;
              break;
            case Heap::SlotKind::Indexed: {
              IndexedArray& ia = heap_.indexed(array);
              ia.write(node.index, v);
              offset = (node.index - ia.lower()) * kWordSize;
              break;
            }
            case Heap::SlotKind::Ring: {
              RingArray& ra = heap_.ring(array);
              ra.write(node.index, v);
              offset = ra.physical_index(node.index) * kWordSize;
              break;
            }
            case Heap::SlotKind::Zeroed:
              heap_.zeroed(array).watermark_write(node.index, v);
              offset = node.index * kWordSize;
              break;
            case Heap::SlotKind::Object:
              throw Fault{"array_write on an object"};
          }
          emit(TraceEvent::write(array.slot, offset, kWordSize, vk));
          observe(Location::array_content(site), v);
        } else if constexpr (std::is_same_v<T, ArrayRemoveLast>) {
          ObjRef array = array_at(node.target, "array_remove_last");
          switch (heap_.kind(array)) {
            case Heap::SlotKind::Fast:
              heap_.fast(array).remove_last();
              break;
            case Heap::SlotKind::Indexed:
              heap_.indexed(array).remove_last();
              break;
            default:
              throw Fault{"array_remove_last needs a flat array"};
          }
        } else if constexpr (std::is_same_v<T, Call>) {
          TempRoots roots(temps_);
          CellValue receiver = eval(node.receiver);
          roots.push(receiver);
          if (receiver.is_null()) {
            trace_.null_dereference_events.insert(stmt.uid);
            return;  // recorded, call skipped
          }
          if (!receiver.is_ref() ||
              heap_.kind(receiver.as_ref()) != Heap::SlotKind::Object) {
            throw Fault{"call of '" + node.method + "' on a non-object value"};
          }
          ClassId cls = heap_.object(receiver.as_ref()).type_id;
          auto target = p_.resolve_method(cls, node.method);
          if (!target) {
            throw Fault{"class '" + p_.klass(cls).name +
                        "' does not understand '" + node.method + "'"};
          }
          const Method& tm = method_of(*target);
          if (tm.params.size() != node.args.size()) {
            throw Fault{"call of '" + node.method + "' with " +
                        std::to_string(node.args.size()) + " argument(s), " +
                        "expected " + std::to_string(tm.params.size())};
          }
          std::vector<CellValue> args;
          args.reserve(node.args.size());
          for (const Expr& a : node.args) {
            CellValue v = eval(a);
            roots.push(v);
            args.push_back(v);
          }
          auto result = run_method(*target, std::move(args));
          if (node.result_local && result) {
            Place place;
            place.kind = Place::Kind::Local;
            place.name = *node.result_local;
            write_place(place, *result);
          }
        }
        // Return is handled by the body loop.
      },
      stmt.node);
}

std::optional<CellValue> Interpreter::run_method(MethodId m,
                                                 std::vector<CellValue> args) {
  if (static_cast<int>(frames_.size()) >= opts_.max_call_depth) {
    throw Fault{"call depth limit exceeded"};
  }
  const Method& method = method_of(m);
  for (size_t i = 0; i < args.size(); ++i) {
    observe(Location::param(m, static_cast<int>(i)), args[i]);
  }
  frames_.push_back(Frame{m, std::move(args),
                          std::vector<std::optional<CellValue>>(
                              method.locals.size(), std::nullopt)});
  std::optional<CellValue> result;
  try {
    for (const Stmt& stmt : method.body) {
      if (std::holds_alternative<Return>(stmt.node)) {
        step();
        break;
      }
      exec(stmt);
    }
    if (method.return_expr) {
      CellValue v = eval(*method.return_expr);
      observe(Location::ret(m), v);
      result = v;
    }
  } catch (...) {
    frames_.pop_back();
    throw;
  }
  frames_.pop_back();
  return result;
}

}  // namespace flexgc
