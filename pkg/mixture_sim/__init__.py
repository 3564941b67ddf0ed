"""Student–teacher mixture model of core execution
and exact checks of the executability value-gap bound."""
