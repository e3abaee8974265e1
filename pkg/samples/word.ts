# emits {a} {b} {} {} {} ...
system nonterminating
props a b
state s0 { a }
state s1 { b }
state s2 { }
init s0
edge s0 s1
edge s1 s2
edge s2 s2
