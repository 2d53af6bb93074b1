#include "flexgc/randprog.hpp"

#include <optional>

namespace flexgc {

namespace {

// splitmix64: portable and stable, so seed N means the same program on
// every build.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ULL) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  int below(int n) { return n <= 1 ? 0 : static_cast<int>(next() % n); }
  bool pct(int p) { return below(100) < p; }

 private:
  uint64_t state_;
};

enum class GlobalRole { Generic, FastArr, RingArr, CallocArr, ZeroedArr };

struct ArrayInfo {
  ArrayKind kind;
  int size = 0;   // used cells (fast/indexed/calloc)
  int lower = 0;  // indexed/ring
  int upper = -1; // ring
  int length = 0; // zeroed
};

struct LocalState {
  bool bound = false;
  std::optional<int> obj_class;       // currently holds an object of this class
  std::optional<ArrayInfo> array;     // currently holds a tracked array
};

class Generator {
 public:
  Generator(uint64_t seed, const RandProgParams& params)
      : rng_(seed), P(params) {}

  Program build() {
    int n = std::max(1, P.classes);
    int pool = std::max(1, P.method_pool);

    arity_.resize(pool);
    returns_.resize(pool);
    for (int i = 0; i < pool; ++i) {
      arity_[i] = rng_.below(P.max_call_args + 1);
      returns_[i] = rng_.pct(50);
    }

    // Hierarchy: roots define every pool method so any object understands
    // any pool name; subclasses override at random.
    std::vector<std::optional<int>> parents(n);
    for (int c = 1; c < n; ++c) {
      if (rng_.pct(60)) parents[c] = rng_.below(c);
    }
    for (int c = 0; c < n; ++c) {
      ClassDecl cls;
      cls.name = "C" + std::to_string(c);
      if (parents[c]) cls.parent = "C" + std::to_string(*parents[c]);
      for (int f = 0; f < P.fields_per_class; ++f) {
        cls.fields.push_back("f" + std::to_string(c) + "_" + std::to_string(f));
      }
      for (int mi = 0; mi < pool; ++mi) {
        bool is_root = !parents[c].has_value();
        if (is_root || rng_.pct(40)) cls.methods.push_back(make_method(mi));
      }
      prog_.classes.push_back(std::move(cls));
    }
    class_count_ = n;

    for (int g = 0; g < P.globals; ++g) {
      prog_.globals.push_back("g" + std::to_string(g));
      switch (g % 5) {
        case 0: groles_.push_back(GlobalRole::FastArr); break;
        case 1: groles_.push_back(GlobalRole::Generic); break;
        case 2: groles_.push_back(GlobalRole::CallocArr); break;
        case 3: groles_.push_back(GlobalRole::RingArr); break;
        default: groles_.push_back(GlobalRole::ZeroedArr); break;
      }
      glen_.push_back(1 + rng_.below(6));
    }

    ClassDecl main_cls;
    main_cls.name = "MAIN";
    main_cls.methods.push_back(make_entry());
    prog_.classes.push_back(std::move(main_cls));
    prog_.entry_class = "MAIN";
    prog_.entry_method = "main";

    fill_bodies();
    assign_stmt_uids(prog_);
    return std::move(prog_);
  }

 private:
  struct Ctx {
    Method* method = nullptr;
    int pool_index = -1;  // -1 for entry
    std::vector<LocalState> locals;
    int params = 0;
  };

  Method make_method(int pool_index) {
    Method m;
    m.name = "m" + std::to_string(pool_index);
    for (int a = 0; a < arity_[pool_index]; ++a) {
      m.params.push_back("a" + std::to_string(a));
    }
    int nlocals = 3 + rng_.below(3);
    for (int l = 0; l < nlocals; ++l) m.locals.push_back("l" + std::to_string(l));
    return m;
  }

  Method make_entry() {
    Method m;
    m.name = "main";
    int nlocals = 4 + rng_.below(3);
    for (int l = 0; l < nlocals; ++l) m.locals.push_back("l" + std::to_string(l));
    return m;
  }

  // Bodies are generated once the class list is final, so dispatch over
  // method names sees the whole pool.
  void fill_bodies() {
    for (auto& cls : prog_.classes) {
      for (auto& m : cls.methods) {
        int pool_index = m.name == "main" ? -1 : std::stoi(m.name.substr(1));
        gen_body(m, pool_index);
      }
    }
  }

  void gen_body(Method& m, int pool_index) {
    Ctx ctx;
    ctx.method = &m;
    ctx.pool_index = pool_index;
    ctx.locals.assign(m.locals.size(), LocalState{});
    ctx.params = static_cast<int>(m.params.size());

    if (pool_index < 0) {
      // Entry prologue binds every global so reads are safe anywhere later.
      for (int g = 0; g < P.globals; ++g) emit_global_init(ctx, g);
    }

    int budget = P.body_statements;
    for (int i = 0; i < budget; ++i) emit_statement(ctx);

    if (pool_index >= 0 && returns_[pool_index]) {
      m.return_expr = value_expr(ctx);
    }
    if (rng_.pct(15)) m.body.push_back(Stmt{-1, Return{}});
  }

  void emit_global_init(Ctx& ctx, int g) {
    Place into;
    into.kind = Place::Kind::Global;
    into.name = prog_.globals[static_cast<size_t>(g)];
    switch (groles_[static_cast<size_t>(g)]) {
      case GlobalRole::Generic: {
        Expr v = rng_.pct(40) ? null_lit() : fresh_object();
        ctx.method->body.push_back(Stmt{-1, AssignGlobal{into.name, v}});
        break;
      }
      case GlobalRole::FastArr:
        ctx.method->body.push_back(Stmt{
            -1, ArrayCreate{into, ArrayKind::Fast, next_site_++,
                            {rng_.below(4)}}});
        break;
      case GlobalRole::RingArr:
        ctx.method->body.push_back(Stmt{
            -1, ArrayCreate{into, ArrayKind::Ring, next_site_++,
                            {rng_.below(4), rng_.below(5) - 2}}});
        break;
      case GlobalRole::CallocArr:
        ctx.method->body.push_back(Stmt{
            -1, ArrayCreate{into, ArrayKind::Calloc, next_site_++,
                            {glen_[static_cast<size_t>(g)]}}});
        break;
      case GlobalRole::ZeroedArr:
        ctx.method->body.push_back(Stmt{
            -1, ArrayCreate{into, ArrayKind::Zeroed, next_site_++,
                            {glen_[static_cast<size_t>(g)]}}});
        break;
    }
  }

  Expr fresh_object() {
    return new_object("C" + std::to_string(rng_.below(class_count_)),
                      next_site_++);
  }

  std::optional<int> pick_local(const Ctx& ctx, auto&& pred) {
    std::vector<int> candidates;
    for (int i = 0; i < static_cast<int>(ctx.locals.size()); ++i) {
      if (pred(ctx.locals[static_cast<size_t>(i)])) candidates.push_back(i);
    }
    if (candidates.empty()) return std::nullopt;
    return candidates[static_cast<size_t>(rng_.below(
        static_cast<int>(candidates.size())))];
  }

  std::string local_name(const Ctx& ctx, int i) {
    return ctx.method->locals[static_cast<size_t>(i)];
  }

  // A value safe to evaluate anywhere: may be null, an object, or whatever
  // a bound slot currently holds.
  Expr value_expr(Ctx& ctx) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      switch (rng_.below(7)) {
        case 0:
          return null_lit();
        case 1:
          return fresh_object();
        case 2: {
          auto i = pick_local(ctx, [](const LocalState& l) { return l.bound; });
          if (i) return local_read(local_name(ctx, *i));
          break;
        }
        case 3:
          if (P.globals > 0) {
            return global_read(
                prog_.globals[static_cast<size_t>(rng_.below(P.globals))]);
          }
          break;
        case 4:
          if (ctx.params > 0) return param_read(rng_.below(ctx.params));
          break;
        case 5: {
          // Field read off an object-holding local; fresh fields are null.
          auto i = pick_local(ctx, [](const LocalState& l) {
            return l.obj_class.has_value();
          });
          if (i) {
            int cls = *ctx.locals[static_cast<size_t>(*i)].obj_class;
            int f = rng_.below(P.fields_per_class);
            return field_read(local_read(local_name(ctx, *i)),
                              field_name(cls, f));
          }
          break;
        }
        case 6: {
          auto read = array_read_expr(ctx);
          if (read) return *read;
          break;
        }
      }
    }
    return null_lit();
  }

  std::string field_name(int cls, int f) {
    return "f" + std::to_string(cls) + "_" + std::to_string(f);
  }

  std::optional<Expr> array_read_expr(Ctx& ctx) {
    auto i = pick_local(ctx, [](const LocalState& l) {
      if (!l.array) return false;
      const ArrayInfo& a = *l.array;
      switch (a.kind) {
        case ArrayKind::Fast:
        case ArrayKind::Indexed:
        case ArrayKind::Calloc:
          return a.size > 0;
        case ArrayKind::Ring:
          return a.upper >= a.lower;
        case ArrayKind::Zeroed:
          return a.length > 0;
      }
      return false;
    });
    if (!i) return std::nullopt;
    const ArrayInfo& a = *ctx.locals[static_cast<size_t>(*i)].array;
    Place from;
    from.kind = Place::Kind::Local;
    from.name = local_name(ctx, *i);
    int index = 0;
    switch (a.kind) {
      case ArrayKind::Fast:
      case ArrayKind::Calloc:
        index = rng_.below(a.size);
        break;
      case ArrayKind::Indexed:
        index = a.lower + rng_.below(a.size);
        break;
      case ArrayKind::Ring:
        index = a.lower + rng_.below(a.upper - a.lower + 1);
        break;
      case ArrayKind::Zeroed:
        index = rng_.below(a.length);
        break;
    }
    return array_read(from, index);
  }

  Expr receiver_expr(Ctx& ctx) {
    if (rng_.pct(10)) return null_lit();  // recorded and skipped at runtime
    if (rng_.pct(40)) {
      auto i = pick_local(ctx, [](const LocalState& l) {
        return l.obj_class.has_value();
      });
      if (i) return local_read(local_name(ctx, *i));
    }
    return fresh_object();
  }

  void set_local(Ctx& ctx, int i, LocalState state) {
    state.bound = true;
    ctx.locals[static_cast<size_t>(i)] = state;
  }

  void emit_statement(Ctx& ctx) {
    switch (rng_.below(10)) {
      case 0: {  // local = value
        int i = rng_.below(static_cast<int>(ctx.locals.size()));
        Expr v = value_expr(ctx);
        LocalState st;
        if (v.kind == Expr::Kind::NewObject) {
          st.obj_class = std::stoi(v.name.substr(1));
        }
        ctx.method->body.push_back(
            Stmt{-1, AssignLocal{local_name(ctx, i), v}});
        set_local(ctx, i, st);
        break;
      }
      case 1: {  // generic global = value
        std::vector<int> generics;
        for (int g = 0; g < P.globals; ++g) {
          if (groles_[static_cast<size_t>(g)] == GlobalRole::Generic) {
            generics.push_back(g);
          }
        }
        if (generics.empty()) break;
        int g = generics[static_cast<size_t>(
            rng_.below(static_cast<int>(generics.size())))];
        ctx.method->body.push_back(Stmt{
            -1,
            AssignGlobal{prog_.globals[static_cast<size_t>(g)], value_expr(ctx)}});
        break;
      }
      case 2: {  // field assign on an object local
        auto i = pick_local(ctx, [](const LocalState& l) {
          return l.obj_class.has_value();
        });
        if (!i) break;
        int cls = *ctx.locals[static_cast<size_t>(*i)].obj_class;
        int f = rng_.below(P.fields_per_class);
        // Field 0 only ever holds objects or null so it stays a safe
        // receiver source; the rest take anything.
        Expr v = f == 0 ? (rng_.pct(30) ? null_lit() : fresh_object())
                        : value_expr(ctx);
        ctx.method->body.push_back(
            Stmt{-1, AssignField{local_read(local_name(ctx, *i)),
                                 field_name(cls, f), v}});
        break;
      }
      case 3: {  // create a local array
        int i = rng_.below(static_cast<int>(ctx.locals.size()));
        Place into;
        into.kind = Place::Kind::Local;
        into.name = local_name(ctx, i);
        ArrayInfo info;
        ArrayCreate create;
        create.into = into;
        create.site = next_site_++;
        switch (rng_.below(5)) {
          case 0:
            create.kind = ArrayKind::Fast;
            create.args = {rng_.below(4)};
            info = ArrayInfo{ArrayKind::Fast, 0, 0, -1, 0};
            break;
          case 1: {
            int lower = rng_.below(7) - 3;
            create.kind = ArrayKind::Indexed;
            create.args = {rng_.below(4), lower};
            info = ArrayInfo{ArrayKind::Indexed, 0, lower, -1, 0};
            break;
          }
          case 2: {
            int lower = rng_.below(7) - 3;
            create.kind = ArrayKind::Ring;
            create.args = {rng_.below(4), lower};
            info = ArrayInfo{ArrayKind::Ring, 0, lower, lower - 1, 0};
            break;
          }
          case 3: {
            int siz = 1 + rng_.below(5);
            create.kind = ArrayKind::Calloc;
            create.args = {siz};
            info = ArrayInfo{ArrayKind::Calloc, siz, 0, -1, 0};
            break;
          }
          default: {
            int len = 1 + rng_.below(6);
            create.kind = ArrayKind::Zeroed;
            create.args = {len};
            info = ArrayInfo{ArrayKind::Zeroed, 0, 0, -1, len};
            break;
          }
        }
        ctx.method->body.push_back(Stmt{-1, std::move(create)});
        LocalState st;
        st.array = info;
        set_local(ctx, i, st);
        break;
      }
      case 4: {  // operate on a tracked local array
        auto i = pick_local(ctx, [](const LocalState& l) {
          return l.array.has_value();
        });
        if (!i) break;
        emit_local_array_op(ctx, *i);
        break;
      }
      case 5: {  // extend/prepend a global array
        std::vector<int> arrays;
        for (int g = 0; g < P.globals; ++g) {
          GlobalRole r = groles_[static_cast<size_t>(g)];
          if (r == GlobalRole::FastArr || r == GlobalRole::RingArr) {
            arrays.push_back(g);
          }
        }
        if (arrays.empty()) break;
        int g = arrays[static_cast<size_t>(
            rng_.below(static_cast<int>(arrays.size())))];
        Place target;
        target.kind = Place::Kind::Global;
        target.name = prog_.globals[static_cast<size_t>(g)];
        Expr v = value_expr(ctx);
        if (groles_[static_cast<size_t>(g)] == GlobalRole::RingArr &&
            rng_.pct(50)) {
          ctx.method->body.push_back(Stmt{-1, ArrayPrepend{target, v}});
        } else {
          ctx.method->body.push_back(Stmt{-1, ArrayExtend{target, v}});
        }
        break;
      }
      case 6: {  // fixed-size global array traffic
        std::vector<int> arrays;
        for (int g = 0; g < P.globals; ++g) {
          GlobalRole r = groles_[static_cast<size_t>(g)];
          if ((r == GlobalRole::CallocArr || r == GlobalRole::ZeroedArr) &&
              glen_[static_cast<size_t>(g)] > 0) {
            arrays.push_back(g);
          }
        }
        if (arrays.empty()) break;
        int g = arrays[static_cast<size_t>(
            rng_.below(static_cast<int>(arrays.size())))];
        Place target;
        target.kind = Place::Kind::Global;
        target.name = prog_.globals[static_cast<size_t>(g)];
        int index = rng_.below(glen_[static_cast<size_t>(g)]);
        if (rng_.pct(50)) {
          ctx.method->body.push_back(
              Stmt{-1, ArrayWrite{target, index, value_expr(ctx)}});
        } else {
          int dst = rng_.below(static_cast<int>(ctx.locals.size()));
          ctx.method->body.push_back(
              Stmt{-1, AssignLocal{local_name(ctx, dst),
                                   array_read(target, index)}});
          set_local(ctx, dst, LocalState{});
        }
        break;
      }
      case 7:
      case 8: {  // call
        if (ctx.pool_index + 1 >= static_cast<int>(arity_.size())) break;
        int callee = ctx.pool_index + 1 +
                     rng_.below(static_cast<int>(arity_.size()) -
                                ctx.pool_index - 1);
        Call call;
        call.receiver = receiver_expr(ctx);
        call.method = "m" + std::to_string(callee);
        for (int a = 0; a < arity_[static_cast<size_t>(callee)]; ++a) {
          call.args.push_back(value_expr(ctx));
        }
        if (returns_[static_cast<size_t>(callee)] && rng_.pct(70)) {
          int i = rng_.below(static_cast<int>(ctx.locals.size()));
          call.result_local = local_name(ctx, i);
          // The callee might skip on a null receiver and leave the local
          // alone, so only treat it as bound if it already was.
          LocalState st;
          st.bound = ctx.locals[static_cast<size_t>(i)].bound;
          ctx.locals[static_cast<size_t>(i)] = st;
        }
        ctx.method->body.push_back(Stmt{-1, std::move(call)});
        break;
      }
      default: {  // move a value into a fresh local
        int i = rng_.below(static_cast<int>(ctx.locals.size()));
        Expr v = value_expr(ctx);
        LocalState st;
        if (v.kind == Expr::Kind::NewObject) {
          st.obj_class = std::stoi(v.name.substr(1));
        }
        ctx.method->body.push_back(Stmt{-1, AssignLocal{local_name(ctx, i), v}});
        set_local(ctx, i, st);
        break;
      }
    }
  }

  void emit_local_array_op(Ctx& ctx, int i) {
    ArrayInfo& a = *ctx.locals[static_cast<size_t>(i)].array;
    Place target;
    target.kind = Place::Kind::Local;
    target.name = local_name(ctx, i);

    auto push = [&](StmtNode node) {
      ctx.method->body.push_back(Stmt{-1, std::move(node)});
    };

    switch (a.kind) {
      case ArrayKind::Fast:
      case ArrayKind::Indexed:
      case ArrayKind::Calloc: {
        int choice = rng_.below(4);
        if (choice == 0) {
          push(ArrayExtend{target, value_expr(ctx)});
          a.size += 1;
        } else if (choice == 1 && a.size > 0) {
          int index = a.lower + rng_.below(a.size);
          push(ArrayWrite{target, index, value_expr(ctx)});
        } else if (choice == 2 && a.size > 0) {
          int index = a.lower + rng_.below(a.size);
          int dst = rng_.below(static_cast<int>(ctx.locals.size()));
          push(AssignLocal{local_name(ctx, dst), array_read(target, index)});
          set_local(ctx, dst, LocalState{});
          if (dst == i) return;  // overwrote the array itself
        } else if (choice == 3 && a.size > 0 && a.kind != ArrayKind::Calloc) {
          push(ArrayRemoveLast{target});
          a.size -= 1;
        } else {
          push(ArrayExtend{target, value_expr(ctx)});
          a.size += 1;
        }
        break;
      }
      case ArrayKind::Ring: {
        int count = a.upper - a.lower + 1;
        int choice = rng_.below(4);
        if (choice == 0) {
          push(ArrayExtend{target, value_expr(ctx)});
          a.upper += 1;
        } else if (choice == 1) {
          push(ArrayPrepend{target, value_expr(ctx)});
          a.lower -= 1;
        } else if (count > 0 && choice == 2) {
          int index = a.lower + rng_.below(count);
          push(ArrayWrite{target, index, value_expr(ctx)});
        } else if (count > 0) {
          int index = a.lower + rng_.below(count);
          int dst = rng_.below(static_cast<int>(ctx.locals.size()));
          push(AssignLocal{local_name(ctx, dst), array_read(target, index)});
          set_local(ctx, dst, LocalState{});
        } else {
          push(ArrayExtend{target, value_expr(ctx)});
          a.upper += 1;
        }
        break;
      }
      case ArrayKind::Zeroed: {
        int index = rng_.below(a.length);
        if (rng_.pct(60)) {
          push(ArrayWrite{target, index, value_expr(ctx)});
        } else {
          int dst = rng_.below(static_cast<int>(ctx.locals.size()));
          push(AssignLocal{local_name(ctx, dst), array_read(target, index)});
          set_local(ctx, dst, LocalState{});
        }
        break;
      }
    }
  }

  Rng rng_;
  RandProgParams P;
  Program prog_;
  int class_count_ = 0;
  std::vector<int> arity_;
  std::vector<bool> returns_;
  std::vector<GlobalRole> groles_;
  std::vector<int> glen_;
  SiteId next_site_ = 0;
};

}  // namespace

Program random_program(uint64_t seed, const RandProgParams& params) {
  return Generator(seed, params).build();
}

}  // namespace flexgc
