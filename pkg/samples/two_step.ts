system terminating
props a b
state s0 { a }
state s1 { b }
init s0
edge s0 s1
terminal s1
