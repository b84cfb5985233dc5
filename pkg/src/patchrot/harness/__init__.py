"""Command-line harness: rate profiles, run reports, convergence and timing."""
