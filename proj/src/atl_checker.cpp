#include "atlr/atl_checker.hpp"
#include "atlr/errors.hpp"

#include <algorithm>
#include <unordered_map>

namespace atlr
{

namespace
{

class FixpointChecker
{
    const Cgm& _m;
    const SplitHook& _hook;
    CheckStats* _stats;
    std::unordered_map< const Node*, StateSet > _memo;

public:
    FixpointChecker( const Cgm& m, const SplitHook& hook, CheckStats* stats ) : _m{ m }, _hook{ hook }, _stats{ stats }
    {}

    StateSet eval( const Formula& f )
    {
        if ( auto it = _memo.find( f.get() ); it != _memo.end() )
            return it->second;
        auto result = compute( f );
        _memo.emplace( f.get(), result );
        return result;
    }

private:
    void record( std::size_t iterations )
    {
        if ( _stats )
            _stats->max_fixpoint_iterations = std::max( _stats->max_fixpoint_iterations, iterations );
    }

    // Least fixed point Z = goal | (keep & step(Z)).
    template < typename Step >
    StateSet least_fixpoint( const StateSet& keep, const StateSet& goal, Step step )
    {
        StateSet z{ _m.state_count() };
        std::size_t iterations = 0;
        while ( true )
        {
            StateSet next = goal | ( keep & step( z ) );
            if ( next == z )
                break;
            z = std::move( next );
            ++iterations;
        }
        record( iterations );
        return z;
    }

    StateSet compute( const Formula& f )
    {
        const std::size_t n = _m.state_count();
        switch ( f->op )
        {
        case Op::False:
            return StateSet{ n };
        case Op::Atom:
            return _m.label_set( f->name );
        case Op::Implies:
            return eval( f->lhs ).complement() | eval( f->rhs );
        case Op::Next:
            return pre( _m, _m.mask_of( f->agents ), eval( f->lhs ) );
        case Op::Until:
        {
            const auto coal = _m.mask_of( f->agents );
            return least_fixpoint( eval( f->lhs ), eval( f->rhs ),
                                   [ & ]( const StateSet& z ) { return pre( _m, coal, z ); } );
        }
        case Op::DualUntil:
        {
            const auto coal = _m.mask_of( f->agents );
            return least_fixpoint( eval( f->lhs ), eval( f->rhs ),
                                   [ & ]( const StateSet& z ) { return dual_pre( _m, coal, z ); } );
        }
        case Op::Split:
            if ( !_hook )
                throw ContractError( "check_atl: formula contains a split operator" );
            return _hook( f );
        }
        throw ContractError( "check_atl: unknown connective" );
    }
};

class StrategyOracle
{
    const Cgm& _m;
    std::size_t _horizon;
    std::size_t _max_strategies;
    std::unordered_map< const Node*, StateSet > _memo;

    struct Profile
    {
        std::vector< std::size_t > own;  // partial codes of the coalition
        std::vector< std::size_t > rest; // partial codes of the opponents
        std::size_t count = 1;           // |own|^|W|
    };

public:
    StrategyOracle( const Cgm& m, const BruteForceOptions& opts )
        : _m{ m }, _horizon{ opts.horizon.value_or( m.state_count() * m.vector_count() + 1 ) },
          _max_strategies{ opts.max_strategies }
    {}

    StateSet eval( const Formula& f )
    {
        if ( auto it = _memo.find( f.get() ); it != _memo.end() )
            return it->second;
        auto result = compute( f );
        _memo.emplace( f.get(), result );
        return result;
    }

private:
    Profile profile( const std::vector< std::string >& agents ) const
    {
        Profile p;
        const auto coal = _m.mask_of( agents );
        p.own = _m.partial_codes( coal );
        p.rest = _m.partial_codes( _m.all() & ~coal );
        for ( std::size_t s = 0; s < _m.state_count(); ++s )
        {
            if ( p.count > _max_strategies / p.own.size() )
                throw ResourceExceeded( "brute_force_atl: instance too large" );
            p.count *= p.own.size();
        }
        return p;
    }

    // Strategy number k decoded into a choice per state.
    std::vector< std::size_t > strategy( const Profile& p, std::size_t k ) const
    {
        std::vector< std::size_t > choice( _m.state_count() );
        for ( auto& c : choice )
        {
            c = p.own[ k % p.own.size() ];
            k /= p.own.size();
        }
        return choice;
    }

    bool all_runs_until( const Profile& p, const std::vector< std::size_t >& s, const StateSet& keep,
                         const StateSet& goal, StateId v, std::size_t depth, std::vector< bool >& on_path ) const
    {
        if ( goal.contains( v ) )
            return true;
        if ( !keep.contains( v ) || on_path[ v ] || depth >= _horizon )
            return false;
        on_path[ v ] = true;
        bool ok = true;
        for ( auto r : p.rest )
            if ( !all_runs_until( p, s, keep, goal, _m.target( v, s[ v ] + r ), depth + 1, on_path ) )
            {
                ok = false;
                break;
            }
        on_path[ v ] = false;
        return ok;
    }

    bool some_run_until( const Profile& p, const std::vector< std::size_t >& s, const StateSet& keep,
                         const StateSet& goal, StateId v, std::size_t depth, std::vector< bool >& on_path ) const
    {
        if ( goal.contains( v ) )
            return true;
        if ( !keep.contains( v ) || on_path[ v ] || depth >= _horizon )
            return false;
        on_path[ v ] = true;
        bool ok = false;
        for ( auto r : p.rest )
            if ( some_run_until( p, s, keep, goal, _m.target( v, s[ v ] + r ), depth + 1, on_path ) )
            {
                ok = true;
                break;
            }
        on_path[ v ] = false;
        return ok;
    }

    StateSet compute( const Formula& f )
    {
        const std::size_t n = _m.state_count();
        switch ( f->op )
        {
        case Op::False:
            return StateSet{ n };
        case Op::Atom:
            return _m.label_set( f->name );
        case Op::Implies:
            return eval( f->lhs ).complement() | eval( f->rhs );
        case Op::Next:
        {
            const auto target = eval( f->lhs );
            const auto p = profile( f->agents );
            StateSet out{ n };
            for ( std::size_t k = 0; k < p.count; ++k )
            {
                const auto s = strategy( p, k );
                for ( StateId w = 0; w < n; ++w )
                    if ( std::all_of( p.rest.begin(), p.rest.end(),
                                      [ & ]( auto r ) { return target.contains( _m.target( w, s[ w ] + r ) ); } ) )
                        out.insert( w );
            }
            return out;
        }
        case Op::Until:
        case Op::DualUntil:
        {
            const auto keep = eval( f->lhs );
            const auto goal = eval( f->rhs );
            const auto p = profile( f->agents );
            const bool existential = f->op == Op::Until;
            // Until: some strategy makes every run succeed.
            // DualUntil: every strategy leaves some successful run.
            StateSet out = existential ? StateSet{ n } : StateSet::full( n );
            std::vector< bool > on_path( n, false );
            for ( std::size_t k = 0; k < p.count; ++k )
            {
                const auto s = strategy( p, k );
                for ( StateId w = 0; w < n; ++w )
                {
                    if ( existential && !out.contains( w ) && all_runs_until( p, s, keep, goal, w, 0, on_path ) )
                        out.insert( w );
                    if ( !existential && out.contains( w ) && !some_run_until( p, s, keep, goal, w, 0, on_path ) )
                        out.erase( w );
                }
            }
            return out;
        }
        case Op::Split:
            throw ContractError( "brute_force_atl: formula contains a split operator" );
        }
        throw ContractError( "brute_force_atl: unknown connective" );
    }
};

} // namespace

StateSet check_atl( const Cgm& m, const Formula& f, const SplitHook& hook, CheckStats* stats )
{
    return FixpointChecker{ m, hook, stats }.eval( f );
}

StateSet brute_force_atl( const Cgm& m, const Formula& f, const BruteForceOptions& opts )
{
    return StrategyOracle{ m, opts }.eval( f );
}

} // namespace atlr
