from belief_impact.cli.main import main

raise SystemExit(main())
