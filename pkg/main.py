from belief_impact.cli.main import main

if __name__ == "__main__":
    raise SystemExit(main())
