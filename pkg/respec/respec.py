"""
Respec - Copyright (C) 2026 the respec developers

    This program is free software: you can redistribute it and/or modify
    it under the terms of the GNU General Public License as published by
    the Free Software Foundation, either version 3 of the License, or
    (at your option) any later version.

    This program is distributed in the hope that it will be useful,
    but WITHOUT ANY WARRANTY; without even the implied warranty of
    MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
    GNU General Public License for more details.

    You should have received a copy of the GNU General Public License
    along with this program.  If not, see <https://www.gnu.org/licenses/>
"""
import argparse
import json
import logging
import math
import sys
import time

RESPEC_VERSION = '1.0.0'

__version__ = RESPEC_VERSION

logger = logging.getLogger(__name__)

DEFAULT_HALF_WIDTHS = '1e-2,1e-3,1e-4'
DEFAULT_SCHEDULE = '0.4,0.3,0.2,0.15'


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--scene', type=str, help='scene json file')
    common.add_argument('--out-dir', type=str, default=None,
                        help='output folder - default: preference out_dir or .')
    common.add_argument('--seed', type=int, default=None, help='eigensolver start block seed')
    common.add_argument('--threads', type=int, default=None,
                        help='worker threads, RESPEC_THREADS mirrors it')
    common.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    common.add_argument('--base-h', type=float, default=None,
                        help='element size away from windows')
    common.add_argument('--ratio', type=float, default=None, help='grading ratio')
    return common


def process_args(argv=None):
    """ process commandline params
    """
    common = _common_parser()
    parser = argparse.ArgumentParser(prog='respec', parents=[common],
                                     description='spectra of small Neumann resonators')
    parser.add_argument('--version', action='version', version='respec ' + RESPEC_VERSION)
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    mesh = commands.add_parser('mesh', parents=[common], help='triangulate a scene')
    mesh.add_argument('--out', '--mesh-out', dest='out', type=str, default='mesh.txt',
                      help='mesh text file name')
    mesh.add_argument('--svg', action='store_true', help='render the mesh to mesh.svg')
    mesh.add_argument('--dump-matrices', action='store_true',
                      help='write K.mtx and M.mtx in matrix market format')

    capacity = commands.add_parser('capacity', parents=[common],
                                   help='window capacity against the logarithmic law')
    capacity.add_argument('--half-widths', '--half-width', dest='half_widths', type=str,
                          default=DEFAULT_HALF_WIDTHS, help='comma separated window half-widths')
    capacity.add_argument('--method', choices=('fem', 'asymptotic'), default='fem',
                          help='capacity method for the half-widths and --scene')
    capacity.add_argument('--asymptotic', action='store_const', dest='method',
                          const='asymptotic', help='same as --method asymptotic')

    converge = commands.add_parser('converge', parents=[common],
                                   help='spectra along an eps schedule')
    law = converge.add_mutually_exclusive_group(required=True)
    law.add_argument('--gammas', type=str, help='limit resonator values, one per resonator')
    law.add_argument('--coefficients', type=str,
                     help='scaling law coefficients, one per resonator')
    converge.add_argument('--eps', type=str, default=DEFAULT_SCHEDULE,
                          help='decreasing eps schedule')
    converge.add_argument('--count', type=int, default=4, help='eigenpairs per row')
    converge.add_argument('--cutoff', type=float, default=60., help='spectral cutoff')
    converge.add_argument('--capacity-method', choices=('fem', 'asymptotic'), default='fem')
    converge.add_argument('--eig-tol', type=float, default=None)
    converge.add_argument('--eig-maxiter', type=int, default=None)
    converge.add_argument('--svg', action='store_true', help='render trajectory and rate plots')

    design = commands.add_parser('design', parents=[common],
                                 help='windows that place eigenvalues on targets')
    design.add_argument('--targets', type=str, required=True, help='increasing targets')
    design.add_argument('--eps', type=float, required=True, help='resonator scale')
    design.add_argument('--tol', type=float, default=0.02, help='relative eigenvalue tolerance')
    design.add_argument('--eta', type=float, default=None, help='bracket half-width')
    design.add_argument('--max-sweeps', type=int, default=None)
    design.add_argument('--no-truncation-check', action='store_true')

    report = commands.add_parser('report', parents=[common], help='svg plots of a run csv')
    report.add_argument('--run', type=str, required=True, help='run csv')

    return parser.parse_args(argv)


def _solver_config(args, prefs):
    from respec.lib import utils
    from respec.lib.types.solver_config import SolverConfig

    values = prefs.solver_overrides()
    values['threads'] = utils.resolve_threads(args.threads, prefs)
    flags = {
        'seed': args.seed,
        'base_h': args.base_h,
        'ratio': args.ratio,
        'eig_tol': getattr(args, 'eig_tol', None),
        'eig_maxiter': getattr(args, 'eig_maxiter', None),
        'max_sweeps': getattr(args, 'max_sweeps', None),
    }
    values.update({key: value for key, value in flags.items() if value is not None})
    if getattr(args, 'no_truncation_check', False):
        values['truncation_check'] = False
    return SolverConfig(**values)


def _require_scene(args):
    from respec.lib.errors import SceneError
    if not args.scene:
        raise SceneError('--scene is required for %s' % args.command)
    return args.scene


def _emit(payload):
    from respec.lib import io
    sys.stdout.write(io.dumps(payload) + '\n')


def cmd_mesh(args, config, io):
    from respec.lib import geometry, mesh as meshing, numerics, report
    from respec.lib.types.slit_mesh import GradingSpec

    domain = geometry.load_scene(_require_scene(args))
    grading = GradingSpec.for_domain(domain, config.base_h, config.ratio, config.refinement)
    mesh = meshing.triangulate(domain, grading)
    validation = meshing.validate(mesh)
    io.write_with(args.out, lambda path: meshing.write_mesh_text(mesh, path))
    if args.svg:
        io.write_with('mesh.svg', lambda path: report.render_mesh_svg(mesh, path))
    if args.dump_matrices:
        K, M = numerics.assemble(mesh)
        io.write_with('K.mtx', lambda path: numerics.write_matrix_market(path, K))
        io.write_with('M.mtx', lambda path: numerics.write_matrix_market(path, M))
    stats = meshing.mesh_stats(mesh)
    stats['euler_characteristic'] = meshing.euler_characteristic(mesh)
    stats['grading'] = grading.to_json()
    stats['validation'] = validation.to_json()
    io.write_json('mesh.json', stats)
    _emit(stats)
    if not validation.ok:
        logger.warning('mesh violations: %s', ', '.join(validation.kinds()))
    return 0


def cmd_capacity(args, config, io):
    from respec.lib import capacity, geometry, utils

    half_widths = utils.parse_float_list(args.half_widths)
    if args.method == 'asymptotic':
        results = [capacity.capacity_asymptotic(2, a) for a in half_widths]
    else:
        results = capacity.capacity_sweep(half_widths, config)
    rows = []
    for a, result in zip(half_widths, results):
        oracle = 2. * math.pi / math.log(2. / a)
        row = result.to_json()
        row.update({'half_width': a, 'log_law': oracle, 'ratio': result.value / oracle})
        rows.append(row)
    payload = {'capacities': rows}
    if args.scene:
        domain = geometry.load_scene(args.scene)
        payload['gamma_eps'] = [capacity.gamma_eps_for(r, args.method, config)
                                for r in domain.resonators]
    io.write_json('capacity.json', payload)
    _emit(payload)
    return 0


def cmd_converge(args, config, io):
    from respec.lib import designer, geometry, harness, report, utils
    from respec.lib.errors import EXIT_OK, InsufficientData, exit_code_for
    from respec.lib.types.scaling_law import ScalingLaw

    scene = geometry.load_scene(_require_scene(args))
    if args.gammas:
        coefficients = [designer.F(g) for g in utils.parse_float_list(args.gammas)]
    else:
        coefficients = utils.parse_float_list(args.coefficients)
    if len(coefficients) == 1 and len(scene.resonators) > 1:
        coefficients = coefficients * len(scene.resonators)
    laws = [ScalingLaw(2, c) for c in coefficients]

    run = harness.run_convergence(scene, laws, utils.parse_float_list(args.eps), args.count,
                                  args.cutoff, config, args.capacity_method)
    io.write_with('run.csv', lambda path: harness.write_run_csv(run, path))
    summary = {
        'limit': run.limit.to_json(),
        'gammas': run.gammas,
        'rows': [{'eps': r.eps, 'scene': geometry.dump_scene(geometry.rescale(scene, r.eps, r.d))
                  if not r.failed else None,
                  'localization': r.localization.to_json() if r.localization else None,
                  'error': r.error} for r in run.rows],
        'fit': None,
    }
    fit = None
    try:
        fit = harness.fit_rate(run)
        summary['fit'] = fit.to_json()
    except InsufficientData as e:
        logger.info('no rate fit: %s', e)
    io.write_json('run.json', summary)
    if args.svg:
        io.write_with(report.TRAJECTORIES_NAME,
                      lambda path: report.render_trajectories_svg(run, path))
        io.write_with(report.RATE_NAME, lambda path: report.render_rate_svg(run, path, fit))

    failures = [r.error for r in run.rows if r.failed]
    _emit({'rows': len(run.rows), 'failed': len(failures), 'fit': summary['fit'],
           'dtilde': run.column('dtilde').tolist()})
    if failures:
        sys.stderr.write(json.dumps(failures[0], sort_keys=True, default=str) + '\n')
        return max(exit_code_for(f) for f in failures)
    return EXIT_OK


def cmd_design(args, config, io):
    from respec.lib import designer, geometry, utils
    from respec.lib.errors import NoConvergence
    from respec.lib.types.design import DesignProblem

    with open(_require_scene(args), 'r') as f:
        document = json.load(f)
    waveguide, resonators = geometry.parse_scene(document, require_d=False)
    problem = DesignProblem(waveguide, resonators, utils.parse_float_list(args.targets),
                            args.eta, args.tol)
    try:
        result = designer.design(problem, args.eps, config)
    except NoConvergence as e:
        if e.partial is not None:
            io.write_json('design.json', e.partial.to_json())
            io.write_with('trace.csv', lambda path: designer.write_trace_csv(e.partial, path))
        raise
    io.write_json('design.json', result.to_json())
    io.write_with('trace.csv', lambda path: designer.write_trace_csv(result, path))
    _emit(result.to_json())
    return 0


def cmd_report(args, config, io):
    from respec.lib import report

    names, fit = report.render_report(args.run, io.out_dir)
    for name in names:
        io.track(name)
    _emit({'outputs': names, 'fit': fit.to_json() if fit else None})
    return 0


COMMANDS = {
    'mesh': cmd_mesh,
    'capacity': cmd_capacity,
    'converge': cmd_converge,
    'design': cmd_design,
    'report': cmd_report,
}


def _error_line(payload):
    sys.stderr.write(json.dumps(payload, sort_keys=True, default=str) + '\n')


def main(argv=None):
    """ Run one subcommand, returns the exit code
    """
    from respec.color import install_handler
    from respec.lib.errors import EXIT_IO, RespecError
    from respec.lib.io import IO
    from respec.lib.prefs import Prefs
    from respec.lib.types.run import RunManifest

    args = process_args(argv)
    install_handler(args.verbose)
    started = time.time()

    io = None
    code = 0
    try:
        prefs = Prefs()
        config = _solver_config(args, prefs)
        io = IO(args.out_dir or prefs.get('out_dir', '.'))
        code = COMMANDS[args.command](args, config, io)
    except RespecError as e:
        logger.error('%s: %s', e.__class__.__name__, e)
        _error_line(e.to_json())
        code = e.exit_code
    except (OSError, json.JSONDecodeError) as e:
        logger.error('%s', e)
        _error_line({'error': e.__class__.__name__, 'message': str(e)})
        code = EXIT_IO

    if io is not None:
        parameters = {key: value for key, value in sorted(vars(args).items())
                      if key not in ('verbose', 'out_dir')}
        manifest = RunManifest(args.command, args.scene, parameters,
                               config.seed,
                               RESPEC_VERSION, time.time() - started)
        try:
            io.write_manifest(manifest)
        except OSError as e:
            _error_line({'error': e.__class__.__name__, 'message': str(e)})
            code = code or EXIT_IO
    return code


def run_respec():
    """ fire it up
    """
    sys.exit(main())
